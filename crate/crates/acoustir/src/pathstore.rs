//! Parquet persistence of path sets, one row per path.
//!
//! Columns, in order: `source_index` (int32), `path_type` (int8),
//! `distance_m`, `listener_dir_x|y|z`, `source_dir_x|y|z`,
//! `relative_speed_mps`, `speed_of_sound_mps`, `band_0` .. `band_{B-1}`
//! (all float32). Pages are PLAIN encoded and uncompressed so the file size
//! grows linearly with the row count.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use acoustir_core::{FilterPolicy, PathColumns, PathMeta, PathSet, PathSetError, SimConfig};
use bytes::Bytes;
use parquet::basic::{Compression, Encoding, Type as PhysicalType};
use parquet::data_type::{DataType, FloatType, Int32Type};
use parquet::errors::ParquetError;
use parquet::file::metadata::KeyValue;
use parquet::file::properties::{EnabledStatistics, WriterProperties};
use parquet::file::reader::{ChunkReader, FileReader, SerializedFileReader};
use parquet::file::writer::SerializedFileWriter;
use parquet::schema::parser::parse_message_type;

use crate::scene_file::SimConfigDesc;

pub const FORMAT_VERSION: &str = "1";

/// Rows per row group.
const ROW_GROUP_ROWS: usize = 1 << 20;

const FIXED_COLUMNS: [&str; 11] = [
    "source_index",
    "path_type",
    "distance_m",
    "listener_dir_x",
    "listener_dir_y",
    "listener_dir_z",
    "source_dir_x",
    "source_dir_y",
    "source_dir_z",
    "relative_speed_mps",
    "speed_of_sound_mps",
];

#[derive(Debug, thiserror::Error)]
pub enum PathStoreError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Parquet(#[from] ParquetError),
    #[error("refusing to write invalid path set: {0}")]
    Invalid(PathSetError),
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("unsupported format version {found:?} (expected {FORMAT_VERSION})")]
    Version { found: Option<String> },
    #[error("bad metadata `{key}`: {reason}")]
    Metadata { key: &'static str, reason: String },
}

/// Outcome of one write, for the storage benchmark.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WriteStats {
    pub rows: usize,
    pub bytes: u64,
    pub seconds: f64,
}

/// Column names for `bands` bands, in file order.
pub fn column_names(bands: usize) -> Vec<String> {
    FIXED_COLUMNS.iter().map(|s| s.to_string()).chain((0..bands).map(|b| format!("band_{b}"))).collect()
}

fn schema_text(bands: usize) -> String {
    let mut s = String::from("message paths {\n  REQUIRED INT32 source_index;\n  REQUIRED INT32 path_type (INT_8);\n");
    for name in column_names(bands).iter().skip(2) {
        s.push_str(&format!("  REQUIRED FLOAT {name};\n"));
    }
    s.push('}');
    s
}

fn metadata(meta: &PathMeta, bands: usize) -> Vec<KeyValue> {
    let filters: Vec<String> = meta.filters.iter().map(ToString::to_string).collect();
    let mut kv = vec![
        KeyValue::new("format_version".into(), FORMAT_VERSION.to_string()),
        KeyValue::new("num_bands".into(), bands.to_string()),
        KeyValue::new("band_centers_hz".into(), json(&meta.band_centers)),
        KeyValue::new("scene_hash".into(), meta.scene_hash.clone()),
        KeyValue::new("seed".into(), meta.seed.to_string()),
        KeyValue::new("filter_policy".into(), json(&filters)),
        KeyValue::new("source_position".into(), json(&meta.source_position)),
        KeyValue::new("listener_position".into(), json(&meta.listener_position)),
    ];
    if let Some(c) = meta.config {
        kv.push(KeyValue::new("sim_config".into(), json(&SimConfigDesc::from(c))));
    }
    kv
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain values serialize")
}

struct Counting<W> {
    inner: W,
    bytes: u64,
}

impl<W: Write> Write for Counting<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.bytes += n as u64;
        Ok(n)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

/// Writes `paths` to any sink. Returns the number of bytes written.
pub fn write_paths_to<W: Write + Send>(paths: &PathSet, sink: W) -> Result<u64, PathStoreError> {
    paths.validate().map_err(PathStoreError::Invalid)?;
    let bands = paths.num_bands();
    let schema = Arc::new(parse_message_type(&schema_text(bands))?);
    let props = WriterProperties::builder()
        .set_compression(Compression::UNCOMPRESSED)
        .set_dictionary_enabled(false)
        .set_encoding(Encoding::PLAIN)
        .set_statistics_enabled(EnabledStatistics::None)
        .set_max_row_group_size(ROW_GROUP_ROWS)
        .set_key_value_metadata(Some(metadata(paths.meta(), bands)))
        .build();
    let mut writer = SerializedFileWriter::new(Counting { inner: sink, bytes: 0 }, schema, Arc::new(props))?;
    let c = paths.columns();
    let n = paths.len();
    // an empty set still gets one (empty) row group
    let groups: Vec<std::ops::Range<usize>> = if n == 0 {
        std::iter::once(0..0).collect()
    } else {
        (0..n).step_by(ROW_GROUP_ROWS).map(|s| s..(s + ROW_GROUP_ROWS).min(n)).collect()
    };
    for rows in groups {
        let mut group = writer.next_row_group()?;
        let mut col = 0;
        let mut floats = Vec::with_capacity(rows.len());
        while let Some(mut cw) = group.next_column()? {
            match col {
                0 => write_column::<Int32Type>(&mut cw, &c.source_index[rows.clone()])?,
                1 => {
                    let codes: Vec<i32> = c.path_type[rows.clone()].iter().map(|&t| t as i32).collect();
                    write_column::<Int32Type>(&mut cw, &codes)?;
                }
                _ => {
                    floats.clear();
                    let r = rows.clone();
                    match col {
                        2 => floats.extend_from_slice(&c.distance[r]),
                        3..=5 => floats.extend(c.listener_direction[r].iter().map(|d| d[col - 3])),
                        6..=8 => floats.extend(c.source_direction[r].iter().map(|d| d[col - 6])),
                        9 => floats.extend_from_slice(&c.relative_speed[r]),
                        10 => floats.extend_from_slice(&c.speed_of_sound[r]),
                        _ => {
                            let b = col - FIXED_COLUMNS.len();
                            floats.extend(r.map(|row| c.intensities[row * bands + b]));
                        }
                    }
                    write_column::<FloatType>(&mut cw, &floats)?;
                }
            }
            cw.close()?;
            col += 1;
        }
        group.close()?;
    }
    let mut sink = writer.into_inner()?;
    sink.flush()?;
    Ok(sink.bytes)
}

fn write_column<T: DataType>(
    cw: &mut parquet::file::writer::SerializedColumnWriter<'_>,
    values: &[T::T],
) -> Result<(), ParquetError> {
    cw.typed::<T>().write_batch(values, None, None)?;
    Ok(())
}

/// Writes `paths` to `path`, timing everything up to handing the last byte
/// to the OS.
pub fn write_paths(paths: &PathSet, path: &Path) -> Result<WriteStats, PathStoreError> {
    let t0 = Instant::now();
    let file = File::create(path)?;
    let mut sink = BufWriter::new(file);
    write_paths_to(paths, &mut sink)?;
    let file = sink.into_inner().map_err(|e| e.into_error())?;
    let seconds = t0.elapsed().as_secs_f64();
    let bytes = file.metadata()?.len();
    Ok(WriteStats { rows: paths.len(), bytes, seconds })
}

pub fn write_paths_to_vec(paths: &PathSet) -> Result<Vec<u8>, PathStoreError> {
    let mut buf = Vec::new();
    write_paths_to(paths, &mut buf)?;
    Ok(buf)
}

pub fn read_paths(path: &Path) -> Result<PathSet, PathStoreError> {
    read_from(File::open(path)?)
}

pub fn read_paths_from_bytes(data: Vec<u8>) -> Result<PathSet, PathStoreError> {
    read_from(Bytes::from(data))
}

fn meta_value<'a>(kv: &'a [KeyValue], key: &'static str) -> Option<&'a str> {
    kv.iter().find(|e| e.key == key).and_then(|e| e.value.as_deref())
}

fn parse_json<T: serde::de::DeserializeOwned>(kv: &[KeyValue], key: &'static str) -> Result<T, PathStoreError> {
    let text = meta_value(kv, key).ok_or(PathStoreError::Metadata { key, reason: "missing".into() })?;
    serde_json::from_str(text).map_err(|e| PathStoreError::Metadata { key, reason: e.to_string() })
}

fn read_meta(kv: &[KeyValue]) -> Result<PathMeta, PathStoreError> {
    match meta_value(kv, "format_version") {
        Some(FORMAT_VERSION) => {}
        found => return Err(PathStoreError::Version { found: found.map(str::to_string) }),
    }
    let band_centers: Vec<f64> = parse_json(kv, "band_centers_hz")?;
    let num_bands: usize = parse_json(kv, "num_bands")?;
    if num_bands != band_centers.len() {
        return Err(PathStoreError::Metadata {
            key: "num_bands",
            reason: format!("{num_bands} bands but {} centers", band_centers.len()),
        });
    }
    let filters: Vec<String> = parse_json(kv, "filter_policy")?;
    let filters = filters
        .iter()
        .map(|f| f.parse::<FilterPolicy>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| PathStoreError::Metadata { key: "filter_policy", reason: e.to_string() })?;
    let config = match meta_value(kv, "sim_config") {
        Some(_) => Some(SimConfig::from(parse_json::<SimConfigDesc>(kv, "sim_config")?)),
        None => None,
    };
    Ok(PathMeta {
        band_centers,
        scene_hash: meta_value(kv, "scene_hash").unwrap_or_default().to_string(),
        seed: parse_json(kv, "seed")?,
        config,
        filters,
        source_position: parse_json(kv, "source_position")?,
        listener_position: parse_json(kv, "listener_position")?,
    })
}

fn read_from<R: ChunkReader + 'static>(input: R) -> Result<PathSet, PathStoreError> {
    let reader = SerializedFileReader::new(input)?;
    let file_meta = reader.metadata().file_metadata();
    let kv = file_meta.key_value_metadata().map(Vec::as_slice).unwrap_or(&[]);
    let meta = read_meta(kv)?;
    let bands = meta.band_centers.len();

    let schema = file_meta.schema_descr();
    let expected = column_names(bands);
    let found: Vec<String> = schema.columns().iter().map(|c| c.name().to_string()).collect();
    if found != expected {
        let missing: Vec<&String> = expected.iter().filter(|e| !found.contains(e)).collect();
        return Err(PathStoreError::Schema(if missing.is_empty() {
            format!("columns {found:?}, expected {expected:?}")
        } else {
            format!("missing columns {missing:?}")
        }));
    }
    for (i, c) in schema.columns().iter().enumerate() {
        let want = if i < 2 { PhysicalType::INT32 } else { PhysicalType::FLOAT };
        if c.physical_type() != want {
            return Err(PathStoreError::Schema(format!("column `{}` is {}, expected {want}", c.name(), c.physical_type())));
        }
    }

    let n = file_meta.num_rows() as usize;
    let mut ints: [Vec<i32>; 2] = Default::default();
    let mut floats: Vec<Vec<f32>> = vec![Vec::with_capacity(n); expected.len() - 2];
    for g in 0..reader.num_row_groups() {
        let group = reader.get_row_group(g)?;
        let rows = group.metadata().num_rows() as usize;
        for (i, col) in ints.iter_mut().enumerate() {
            read_column::<Int32Type>(group.get_column_reader(i)?, rows, col)?;
        }
        for (i, col) in floats.iter_mut().enumerate() {
            read_column::<FloatType>(group.get_column_reader(i + 2)?, rows, col)?;
        }
    }
    for (name, len) in expected.iter().zip(ints.iter().map(Vec::len).chain(floats.iter().map(Vec::len))) {
        if len != n {
            return Err(PathStoreError::Schema(format!("column `{name}` has {len} rows, expected {n}")));
        }
    }

    let [source_index, codes] = ints;
    let path_type = codes
        .into_iter()
        .map(|c| i8::try_from(c).map_err(|_| PathStoreError::Schema(format!("path_type code {c} out of int8 range"))))
        .collect::<Result<Vec<i8>, _>>()?;
    let mut f = floats.into_iter();
    let mut next = || f.next().expect("column count checked");
    let distance = next();
    let xyz = |x: Vec<f32>, y: Vec<f32>, z: Vec<f32>| -> Vec<[f32; 3]> {
        x.into_iter().zip(y).zip(z).map(|((x, y), z)| [x, y, z]).collect()
    };
    let listener_direction = xyz(next(), next(), next());
    let source_direction = xyz(next(), next(), next());
    let relative_speed = next();
    let speed_of_sound = next();
    let band_cols: Vec<Vec<f32>> = (0..bands).map(|_| next()).collect();
    let mut intensities = Vec::with_capacity(n * bands);
    for row in 0..n {
        intensities.extend(band_cols.iter().map(|c| c[row]));
    }
    let cols = PathColumns {
        source_index,
        path_type,
        distance,
        listener_direction,
        source_direction,
        relative_speed,
        speed_of_sound,
        intensities,
    };
    PathSet::from_columns(meta, cols).map_err(|e| PathStoreError::Schema(e.to_string()))
}

fn read_column<T: DataType>(
    reader: parquet::column::reader::ColumnReader,
    rows: usize,
    out: &mut Vec<T::T>,
) -> Result<(), ParquetError> {
    let mut typed = parquet::column::reader::get_typed_column_reader::<T>(reader);
    let mut remaining = rows;
    while remaining > 0 {
        let (records, _, _) = typed.read_records(remaining, None, None, out)?;
        if records == 0 {
            break;
        }
        remaining -= records;
    }
    Ok(())
}

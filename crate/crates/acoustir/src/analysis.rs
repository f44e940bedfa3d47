//! Small statistics used by the benchmarks and decay checks.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares of `y` on `x`. `r2` is 1 when `y` is constant and
/// fitted exactly.
pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - (intercept + slope * a)).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else if ss_res == 0.0 { 1.0 } else { 0.0 };
    LinearFit { slope, intercept, r2 }
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    sxy / (sxx * syy).sqrt()
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Schroeder backward-integrated energy decay in dB, 0 dB at the start.
pub fn schroeder_db(signal: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut edc: Vec<f64> = signal
        .iter()
        .rev()
        .map(|s| {
            acc += s * s;
            acc
        })
        .collect();
    edc.reverse();
    let total = edc.first().copied().unwrap_or(0.0);
    edc.iter().map(|e| 10.0 * (e / total).log10()).collect()
}

/// RT60 from a straight-line fit to the decay between `hi_db` and `lo_db`
/// (e.g. -5 and -35 for T30).
pub fn rt60_from_decay(decay_db: &[f64], sample_rate: f64, hi_db: f64, lo_db: f64) -> Option<f64> {
    let start = decay_db.iter().position(|&d| d <= hi_db)?;
    let end = decay_db.iter().position(|&d| d <= lo_db)?;
    if end <= start + 1 {
        return None;
    }
    let t: Vec<f64> = (start..end).map(|n| n as f64 / sample_rate).collect();
    let fit = linear_fit(&t, &decay_db[start..end]);
    (fit.slope < 0.0).then(|| -60.0 / fit.slope)
}

/// T30 estimate from a pressure response.
pub fn rt60(signal: &[f64], sample_rate: f64) -> Option<f64> {
    rt60_from_decay(&schroeder_db(signal), sample_rate, -5.0, -35.0)
}

/// Eyring reverberation time `0.161 V / (-S ln(1 - a))` of a box.
pub fn eyring_rt60(dims: [f64; 3], mean_absorption: f64) -> f64 {
    let [x, y, z] = dims;
    let volume = x * y * z;
    let area = 2.0 * (x * y + x * z + y * z);
    0.161 * volume / (-area * (1.0 - mean_absorption).ln())
}

//! Median-split bounding volume hierarchy over scene triangles.

use alloc::vec::Vec;

use crate::vec3::Vec3;

/// Leaves hold at most this many triangles.
pub const MAX_LEAF_SIZE: usize = 4;

/// Padding applied to every node box so flat (zero-thickness) walls still
/// have a volume the slab test can enter.
const BOX_PAD: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub const EMPTY: Aabb = Aabb {
        min: Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
        max: Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
    };

    pub fn grow(&mut self, p: Vec3) {
        self.min = self.min.min(p);
        self.max = self.max.max(p);
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        Aabb { min: self.min.min(o.min), max: self.max.max(o.max) }
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    /// True when `p` is strictly inside on every axis.
    pub fn strictly_contains(&self, p: Vec3) -> bool {
        (0..3).all(|a| p[a] > self.min[a] && p[a] < self.max[a])
    }

    fn padded(&self) -> Aabb {
        let pad = Vec3::new(BOX_PAD, BOX_PAD, BOX_PAD);
        Aabb { min: self.min - pad, max: self.max + pad }
    }

    /// Entry distance of the ray into the box if it overlaps `[t_min, t_max]`.
    #[inline]
    fn hit(&self, origin: Vec3, inv_dir: Vec3, t_min: f64, t_max: f64) -> Option<f64> {
        let mut lo = t_min;
        let mut hi = t_max;
        for a in 0..3 {
            let t0 = (self.min[a] - origin[a]) * inv_dir[a];
            let t1 = (self.max[a] - origin[a]) * inv_dir[a];
            let (near, far) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
            // NaN (0 * inf) leaves the interval untouched.
            if near > lo {
                lo = near;
            }
            if far < hi {
                hi = far;
            }
            if lo > hi {
                return None;
            }
        }
        Some(lo)
    }
}

#[derive(Clone, Debug)]
struct Node {
    bounds: Aabb,
    /// Leaf: first index into `order`. Interior: index of the right child
    /// (the left child always follows its parent).
    start: u32,
    /// Number of triangles for a leaf, zero for interior nodes.
    count: u32,
}

#[derive(Clone, Debug, Default)]
pub struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
}

impl Bvh {
    pub fn build(triangles: &[[Vec3; 3]]) -> Bvh {
        let mut bvh = Bvh { nodes: Vec::new(), order: (0..triangles.len() as u32).collect() };
        if triangles.is_empty() {
            return bvh;
        }
        let boxes: Vec<Aabb> = triangles
            .iter()
            .map(|t| {
                let mut b = Aabb::EMPTY;
                t.iter().for_each(|&v| b.grow(v));
                b.padded()
            })
            .collect();
        let centroids: Vec<Vec3> =
            triangles.iter().map(|t| (t[0] + t[1] + t[2]) / 3.0).collect();
        let mut order = core::mem::take(&mut bvh.order);
        bvh.build_node(&boxes, &centroids, &mut order, 0);
        bvh.order = order;
        bvh
    }

    fn build_node(
        &mut self,
        boxes: &[Aabb],
        centroids: &[Vec3],
        order: &mut [u32],
        offset: usize,
    ) -> usize {
        let bounds = order
            .iter()
            .fold(Aabb::EMPTY, |acc, &i| acc.union(&boxes[i as usize]));
        let index = self.nodes.len();
        if order.len() <= MAX_LEAF_SIZE {
            self.nodes.push(Node { bounds, start: offset as u32, count: order.len() as u32 });
            return index;
        }
        let mut cbounds = Aabb::EMPTY;
        order.iter().for_each(|&i| cbounds.grow(centroids[i as usize]));
        let ext = cbounds.extent();
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        let mid = order.len() / 2;
        order.select_nth_unstable_by(mid, |&a, &b| {
            let ca = centroids[a as usize][axis];
            let cb = centroids[b as usize][axis];
            ca.total_cmp(&cb).then(a.cmp(&b))
        });
        self.nodes.push(Node { bounds, start: 0, count: 0 });
        let (left, right) = order.split_at_mut(mid);
        self.build_node(boxes, centroids, left, offset);
        let right_index = self.build_node(boxes, centroids, right, offset + mid);
        self.nodes[index].start = right_index as u32;
        index
    }

    pub fn bounds(&self) -> Aabb {
        self.nodes.first().map_or(Aabb::EMPTY, |n| n.bounds)
    }

    /// Nearest triangle for which `test` reports a distance in `(t_min, t_max)`.
    /// Ties on distance resolve to the lowest triangle index.
    pub fn nearest<F>(&self, origin: Vec3, dir: Vec3, t_min: f64, t_max: f64, mut test: F) -> Option<(u32, f64)>
    where
        F: FnMut(u32) -> Option<f64>,
    {
        if self.nodes.is_empty() {
            return None;
        }
        let inv = Vec3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z);
        let mut best: Option<(u32, f64)> = None;
        let mut stack = [0u32; 64];
        let mut sp = 1usize;
        while sp > 0 {
            sp -= 1;
            let node = &self.nodes[stack[sp] as usize];
            let limit = best.map_or(t_max, |(_, t)| t);
            if node.bounds.hit(origin, inv, t_min, limit).is_none() {
                continue;
            }
            if node.count > 0 {
                let s = node.start as usize;
                for &tri in &self.order[s..s + node.count as usize] {
                    if let Some(t) = test(tri) {
                        if t > t_min && t < t_max {
                            let better = match best {
                                None => true,
                                Some((bi, bt)) => t < bt || (t == bt && tri < bi),
                            };
                            if better {
                                best = Some((tri, t));
                            }
                        }
                    }
                }
            } else {
                let here = stack[sp] + 1;
                stack[sp] = node.start;
                stack[sp + 1] = here;
                sp += 2;
            }
        }
        best
    }

    /// True if any triangle accepted by `test` lies in `(t_min, t_max)`.
    pub fn any<F>(&self, origin: Vec3, dir: Vec3, t_min: f64, t_max: f64, mut test: F) -> bool
    where
        F: FnMut(u32) -> Option<f64>,
    {
        if self.nodes.is_empty() {
            return false;
        }
        let inv = Vec3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z);
        let mut stack = [0u32; 64];
        let mut sp = 1usize;
        while sp > 0 {
            sp -= 1;
            let node = &self.nodes[stack[sp] as usize];
            if node.bounds.hit(origin, inv, t_min, t_max).is_none() {
                continue;
            }
            if node.count > 0 {
                let s = node.start as usize;
                for &tri in &self.order[s..s + node.count as usize] {
                    if matches!(test(tri), Some(t) if t > t_min && t < t_max) {
                        return true;
                    }
                }
            } else {
                let here = stack[sp] + 1;
                stack[sp] = node.start;
                stack[sp + 1] = here;
                sp += 2;
            }
        }
        false
    }

    pub fn max_leaf_size(&self) -> usize {
        self.nodes.iter().map(|n| n.count as usize).max().unwrap_or(0)
    }
}

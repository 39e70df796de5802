//! Pure slit geometry: which segments are removed at each stage.
//!
//! Coordinates are dyadic rationals and therefore exact in `f64`.

use serde::{Deserialize, Serialize};

/// A vertical slit `{x} × [y0, y1]` of the unit square.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slit {
    pub id: usize,
    pub x: f64,
    pub y0: f64,
    pub y1: f64,
    /// Subdivision generation (within its corner copy) that introduced it.
    pub generation: u32,
    /// Corner copy holding the slit: band index for truncations of the
    /// accumulating domain, 0 otherwise.
    pub copy: u32,
    /// Name of the marked set holding its doubled boundary circle.
    pub set: String,
}

impl Slit {
    pub fn length(&self) -> f64 {
        self.y1 - self.y0
    }

    /// Euclidean distance from a point to the segment.
    pub fn euclid_dist(&self, px: f64, py: f64) -> f64 {
        let dy = if py < self.y0 {
            self.y0 - py
        } else if py > self.y1 {
            py - self.y1
        } else {
            0.0
        };
        (px - self.x).hypot(dy)
    }
}

/// Marked-set name of slit `id`; zero padded so name order equals id order.
pub fn slit_set_name(id: usize) -> String {
    format!("slit:{id:06}")
}

/// Segments `(x, y0, y1, generation)` of the n-th slit domain: the square is
/// subdivided dyadically `n − 1` times and every subsquare of every level
/// receives the middle half of its vertical midline.
pub fn q_segments(n: u32) -> Vec<(f64, f64, f64, u32)> {
    let mut out = Vec::new();
    for g in 1..=n {
        let cells = 1u64 << (g - 1);
        let s = 1.0 / cells as f64;
        for b in 0..cells {
            for a in 0..cells {
                let (x0, y0) = (a as f64 * s, b as f64 * s);
                out.push((x0 + s / 2.0, y0 + s / 4.0, y0 + 3.0 * s / 4.0, g));
            }
        }
    }
    out
}

fn finish(raw: Vec<(f64, f64, f64, u32, u32)>) -> Vec<Slit> {
    let mut raw = raw;
    raw.sort_by(|a, b| {
        (a.4, a.3, a.0, a.1).partial_cmp(&(b.4, b.3, b.0, b.1)).expect("finite slit data")
    });
    raw.into_iter()
        .enumerate()
        .map(|(id, (x, y0, y1, generation, copy))| Slit {
            id,
            x,
            y0,
            y1,
            generation,
            copy,
            set: slit_set_name(id),
        })
        .collect()
}

/// Slit registry of the n-th slit domain; `(4ⁿ − 1)/3` slits.
pub fn q_slits(n: u32) -> Vec<Slit> {
    finish(q_segments(n).into_iter().map(|(x, a, b, g)| (x, a, b, g, 0)).collect())
}

/// Slit registry of the stage-`n` truncation of the accumulating domain.
///
/// Band `k < n` (the square `[0, 2^-k]²` minus its lower-left quarter) carries
/// the slits of a copy of the (k+1)-th slit domain scaled by `2^-k`; the
/// innermost square `[0, 2^-n]²` carries a full scaled copy of the (n+1)-th.
/// Slits lying on the inner corner's boundary belong to the outer band.
pub fn r_slits(n: u32) -> Vec<Slit> {
    let mut raw = Vec::new();
    for k in 0..=n {
        let scale = 0.5f64.powi(k as i32);
        let corner = scale / 2.0;
        for (x, y0, y1, g) in q_segments(k + 1) {
            let (x, y0, y1) = (x * scale, y0 * scale, y1 * scale);
            let inside_corner = x < corner && y1 <= corner;
            if k == n || !inside_corner {
                raw.push((x, y0, y1, g, k));
            }
        }
    }
    finish(raw)
}

/// Planarity-sum counts computed from slit geometry alone.
///
/// A slit circle has path-metric diameter equal to the slit length; the
/// distance from `(px, py)` to a slit is approximated from below by the
/// Euclidean point–segment distance.  Returns `n_k` for `k = 0..=k_max`: the
/// number of slits meeting the open ball with `diam ∈ (2^-k r, 2^-k+1 r]`.
pub fn registry_counts(slits: &[Slit], px: f64, py: f64, r: f64, k_max: u32) -> Vec<u64> {
    let mut counts = vec![0u64; k_max as usize + 1];
    for s in slits {
        if s.euclid_dist(px, py) >= r {
            continue;
        }
        if let Some(k) = scale_class(s.length(), r) {
            if k <= k_max {
                counts[k as usize] += 1;
            }
        }
    }
    counts
}

/// The `k >= 0` with `2^-k r < diam <= 2^-k+1 r`, if any.
pub fn scale_class(diam: f64, r: f64) -> Option<u32> {
    if !(diam > 0.0) || diam > 2.0 * r {
        return None;
    }
    // Smallest k with 2^-k r < diam.
    let mut k = 0u32;
    let mut lower = r;
    while lower >= diam {
        k += 1;
        lower /= 2.0;
        if k > 1000 {
            return None;
        }
    }
    Some(k)
}

/// Partial sums `S_K = Σ_{k<=K} n_k 2^{-kQ}`.
pub fn partial_sums(counts: &[u64], q: f64) -> Vec<f64> {
    let mut acc = 0.0;
    counts
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            acc += n as f64 * 2f64.powf(-(k as f64) * q);
            acc
        })
        .collect()
}

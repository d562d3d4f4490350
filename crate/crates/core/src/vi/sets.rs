use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};

/// Closed convex set with an exact Euclidean projection.
pub trait ConvexSet: Send + Sync + std::fmt::Debug {
    fn dim(&self) -> usize;

    /// Writes `Π(y)` into `out`. Both slices have length `dim()`.
    fn project_into(&self, y: &[f64], out: &mut [f64]);

    fn project(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.project_into(y, &mut out);
        out
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool;

    /// A random point of the set (not necessarily uniform).
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;
}

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxSet {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] <= upper[i])) {
            return Err(Error::InvalidModel(format!("box bound {i}: lower {} exceeds upper {}", lower[i], upper[i])));
        }
        Ok(Self { lower, upper })
    }

    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }
}

impl ConvexSet for BoxSet {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn project_into(&self, y: &[f64], out: &mut [f64]) {
        for i in 0..y.len() {
            out[i] = y[i].max(self.lower[i]).min(self.upper[i]);
        }
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && x.iter().zip(self.lower.iter().zip(&self.upper)).all(|(v, (l, u))| *v >= l - tol && *v <= u + tol)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| {
                let (l, u) = (l.max(-1e6), u.min(1e6));
                if l == u {
                    l
                } else {
                    rng.gen_range(l..=u)
                }
            })
            .collect()
    }
}

/// Coordinate-wise clamp of `y` onto `set`.
pub fn project_box(set: &BoxSet, y: &[f64]) -> Result<Vec<f64>> {
    check_dim(set.dim(), y.len())?;
    Ok(set.project(y))
}

/// Feasible set of one network firm: `(s_1..s_W, g_1..g_W)` with
/// `s >= 0`, `0 <= g <= cap` and `sum s = sum g`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirmPolyhedron {
    pub caps: Vec<f64>,
}

impl FirmPolyhedron {
    pub fn new(caps: Vec<f64>) -> Result<Self> {
        if caps.is_empty() || caps.iter().any(|c| !(*c > 0.0) || !c.is_finite()) {
            return Err(Error::InvalidModel("firm capacities must be positive and finite".into()));
        }
        Ok(Self { caps })
    }

    pub fn nodes(&self) -> usize {
        self.caps.len()
    }

    /// Σs(ν) − Σg(ν) for the multiplier `nu`.
    fn imbalance(&self, y: &[f64], nu: f64) -> f64 {
        let w = self.nodes();
        let mut d = 0.0;
        for i in 0..w {
            d += (y[i] - nu).max(0.0);
            d -= (y[w + i] + nu).max(0.0).min(self.caps[i]);
        }
        d
    }
}

impl ConvexSet for FirmPolyhedron {
    fn dim(&self) -> usize {
        2 * self.caps.len()
    }

    fn project_into(&self, y: &[f64], out: &mut [f64]) {
        let w = self.nodes();
        // The imbalance is continuous, piecewise linear and nonincreasing in ν.
        // Its breakpoints are y_s, −y_g and cap − y_g; bracket the root between
        // consecutive breakpoints, then solve the linear piece exactly.
        let mut bps: Vec<f64> = Vec::with_capacity(3 * w);
        for i in 0..w {
            bps.push(y[i]);
            bps.push(-y[w + i]);
            bps.push(self.caps[i] - y[w + i]);
        }
        bps.sort_by(|a, b| a.total_cmp(b));
        let lo_nu = bps[0] - 1.0;
        let hi_nu = bps[bps.len() - 1] + 1.0;
        // At lo_nu every s is positive and every g is at zero: imbalance > 0 unless
        // all sales vanish. At hi_nu sales vanish and generation is at cap: < 0.
        let (mut a, mut b) = (lo_nu, hi_nu);
        let (mut fa, mut fb) = (self.imbalance(y, a), self.imbalance(y, b));
        let nu = if fa <= 0.0 {
            a
        } else if fb >= 0.0 {
            b
        } else {
            // Locate the linear piece containing the root by bisection on breakpoints.
            let (mut lo_i, mut hi_i) = (0usize, bps.len() - 1);
            if self.imbalance(y, bps[0]) <= 0.0 {
                b = bps[0];
                fb = self.imbalance(y, b);
            } else if self.imbalance(y, bps[hi_i]) >= 0.0 {
                a = bps[hi_i];
                fa = self.imbalance(y, a);
            } else {
                while hi_i - lo_i > 1 {
                    let mid = (lo_i + hi_i) / 2;
                    if self.imbalance(y, bps[mid]) > 0.0 {
                        lo_i = mid;
                    } else {
                        hi_i = mid;
                    }
                }
                a = bps[lo_i];
                b = bps[hi_i];
                fa = self.imbalance(y, a);
                fb = self.imbalance(y, b);
            }
            if fb == 0.0 {
                b
            } else if fa == fb {
                0.5 * (a + b)
            } else {
                (a + fa * (b - a) / (fa - fb)).clamp(a, b)
            }
        };
        let mut ss = 0.0;
        let mut sg = 0.0;
        for i in 0..w {
            out[i] = (y[i] - nu).max(0.0);
            out[w + i] = (y[w + i] + nu).max(0.0).min(self.caps[i]);
            ss += out[i];
            sg += out[w + i];
        }
        // Remove the last rounding residue on a free coordinate so the balance
        // constraint holds to working precision.
        let gap = ss - sg;
        if gap != 0.0 {
            if let Some(i) = (0..w).find(|&i| out[w + i] > 0.0 && out[w + i] < self.caps[i]) {
                out[w + i] = (out[w + i] + gap).clamp(0.0, self.caps[i]);
            } else if let Some(i) = (0..w).find(|&i| out[i] > 0.0) {
                out[i] = (out[i] - gap).max(0.0);
            }
        }
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        let w = self.nodes();
        if x.len() != 2 * w {
            return false;
        }
        let (mut ss, mut sg) = (0.0, 0.0);
        for i in 0..w {
            if x[i] < -tol || x[w + i] < -tol || x[w + i] > self.caps[i] + tol {
                return false;
            }
            ss += x[i];
            sg += x[w + i];
        }
        (ss - sg).abs() <= tol * (1.0 + ss.abs())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let w = self.nodes();
        let total: f64 = self.caps.iter().sum();
        let mut y = vec![0.0; 2 * w];
        for i in 0..w {
            y[i] = rng.gen_range(0.0..=total / w as f64);
            y[w + i] = rng.gen_range(0.0..=self.caps[i]);
        }
        self.project(&y)
    }
}

/// Euclidean projection onto a firm polyhedron.
pub fn project_firm_polyhedron(set: &FirmPolyhedron, y: &[f64]) -> Result<Vec<f64>> {
    check_dim(set.dim(), y.len())?;
    Ok(set.project(y))
}

/// Cartesian product of convex sets; projection acts block-wise.
#[derive(Debug, Clone)]
pub struct ProductSet {
    blocks: Vec<Arc<dyn ConvexSet>>,
    offsets: Vec<usize>,
}

impl ProductSet {
    pub fn new(blocks: Vec<Arc<dyn ConvexSet>>) -> Self {
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        let mut o = 0;
        offsets.push(0);
        for b in &blocks {
            o += b.dim();
            offsets.push(o);
        }
        Self { blocks, offsets }
    }

    pub fn blocks(&self) -> &[Arc<dyn ConvexSet>] {
        &self.blocks
    }

    pub fn block_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }
}

impl ConvexSet for ProductSet {
    fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn project_into(&self, y: &[f64], out: &mut [f64]) {
        for (i, b) in self.blocks.iter().enumerate() {
            let r = self.block_range(i);
            b.project_into(&y[r.clone()], &mut out[r]);
        }
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim() && self.blocks.iter().enumerate().all(|(i, b)| b.contains(&x[self.block_range(i)], tol))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.blocks.iter().flat_map(|b| b.sample(rng)).collect()
    }
}

//! Nonnegative linear feasibility `A·x = b, x ≥ 0`.
//!
//! Dense two-phase simplex with Bland's rule (smallest-index entering column,
//! smallest-index basic variable on ratio ties), so identical inputs always
//! produce identical points and witnesses. Infeasibility is reported with a
//! Farkas vector `y`: `yᵀA ≤ 0` componentwise and `yᵀb > 0`.

use alloc::vec::Vec;

use super::{solve, FieldTag, MatrixValue, Scalar, Tolerance, VectorValue};
use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FeasiblePoint {
    pub x: VectorValue,
    /// `min_i x_i`.
    pub margin: f64,
    /// `‖A·x − b‖_∞` on the caller's data.
    pub residual: f64,
    /// The strict LP hit the `t ≤ 1` cap because the margin is unbounded.
    pub margin_capped: bool,
    /// Strict mode only: optimal dual `y` with `yᵀA ≤ 0`, `yᵀA·1 ≤ −1` and
    /// `yᵀb = −margin`, proving no point has every `x_i` above the margin.
    pub margin_certificate: Option<Vec<f64>>,
}

/// Farkas certificate of infeasibility, normalized to `‖y‖_∞ = 1`.
///
/// The certified system is `A·x = b − shift·A·1, x ≥ 0`, i.e. no solution of
/// `A·x = b` has every coordinate `≥ shift`. Plain infeasibility has `shift = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasWitness {
    pub y: Vec<f64>,
    pub shift: f64,
    /// `max_j (yᵀA)_j`, nonpositive up to rounding.
    pub max_column_product: f64,
    /// `yᵀ(b − shift·A·1)`, positive.
    pub rhs_product: f64,
}

impl FarkasWitness {
    pub(crate) fn new(y: Vec<f64>, shift: f64, a: &MatrixValue, b: &VectorValue) -> Result<Self> {
        let av = a.to_real_vec()?;
        let bv = shifted_rhs(&av, &b.to_real_vec()?, a.rows(), a.cols(), shift);
        let mut w = finish_witness(y, &av, &bv, a.rows(), a.cols());
        w.shift = shift;
        Ok(w)
    }

    /// Recomputes both Farkas inequalities against `a`, `b`.
    pub fn verify(&self, a: &MatrixValue, b: &VectorValue, tol: Tolerance) -> bool {
        let Ok(av) = a.to_real_vec() else { return false };
        let Ok(bv) = b.to_real_vec() else { return false };
        if self.y.len() != a.rows() || bv.len() != a.rows() {
            return false;
        }
        let bv = shifted_rhs(&av, &bv, a.rows(), a.cols(), self.shift);
        let (max_col, rhs) = farkas_products(&self.y, &av, &bv, a.rows(), a.cols());
        let scale = 1.0 + a.max_abs();
        max_col <= tol.eps() * scale && rhs > 0.0
    }
}

fn shifted_rhs(a: &[f64], b: &[f64], rows: usize, cols: usize, shift: f64) -> Vec<f64> {
    (0..rows)
        .map(|i| b[i] - shift * (0..cols).map(|j| a[i * cols + j]).sum::<f64>())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(FeasiblePoint),
    Infeasible(FarkasWitness),
}

impl Feasibility {
    pub fn point(&self) -> Option<&FeasiblePoint> {
        match self {
            Feasibility::Feasible(p) => Some(p),
            Feasibility::Infeasible(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&FarkasWitness> {
        match self {
            Feasibility::Feasible(_) => None,
            Feasibility::Infeasible(w) => Some(w),
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

fn farkas_products(y: &[f64], a: &[f64], b: &[f64], rows: usize, cols: usize) -> (f64, f64) {
    let max_col = (0..cols)
        .map(|j| (0..rows).map(|i| y[i] * a[i * cols + j]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let rhs = y.iter().zip(b).map(|(yi, bi)| yi * bi).sum();
    (max_col, rhs)
}

/// Finds `x ≥ 0` with `A·x = b`, or a Farkas witness.
///
/// With `strict`, maximizes `t` subject to `x_i ≥ t`; the point is strictly
/// positive iff the returned margin exceeds `tol`.
pub fn nonneg_feasible(a: &MatrixValue, b: &VectorValue, strict: bool, tol: Tolerance) -> Result<Feasibility> {
    if a.field() != FieldTag::Real || b.field() != FieldTag::Real {
        return Err(Error::RealRequired);
    }
    if b.dim() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: b.dim(),
        });
    }
    let rows = a.rows();
    let cols = a.cols();
    let av = a.to_real_vec()?;
    let bv = b.to_real_vec()?;
    let b_scale = bv.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    // Equilibrate rows; zero rows are either vacuous or an immediate witness.
    let mut kept: Vec<usize> = Vec::new();
    let mut row_scale: Vec<f64> = Vec::new();
    for i in 0..rows {
        let r = (0..cols).fold(0.0f64, |m, j| m.max(av[i * cols + j].abs()));
        if r == 0.0 {
            if bv[i].abs() > tol.eps() * (1.0 + b_scale) {
                let mut y = alloc::vec![0.0; rows];
                y[i] = bv[i].signum();
                return Ok(Feasibility::Infeasible(finish_witness(y, &av, &bv, rows, cols)));
            }
            continue;
        }
        kept.push(i);
        row_scale.push(r);
    }
    if kept.is_empty() {
        // Every x ≥ 0 works; pick the all-ones point.
        let x = alloc::vec![1.0; cols];
        let mut point = make_point(&x, &av, &bv, rows, cols, false);
        point.margin_capped = strict;
        return Ok(Feasibility::Feasible(point));
    }

    let m = kept.len();
    let structural = if strict { cols + 1 } else { cols };
    let mut sys_a = alloc::vec![0.0; m * structural];
    let mut sys_b = alloc::vec![0.0; m];
    for (r, (&i, &s)) in kept.iter().zip(&row_scale).enumerate() {
        for j in 0..cols {
            sys_a[r * structural + j] = av[i * cols + j] / s;
        }
        if strict {
            sys_a[r * structural + cols] = (0..cols).map(|j| sys_a[r * structural + j]).sum();
        }
        sys_b[r] = bv[i] / s;
    }
    let feas_tol = tol.eps() * (1.0 + sys_b.iter().map(|x| x.abs()).sum::<f64>());

    let to_original_y = |y_sys: &[f64]| -> Vec<f64> {
        let mut y = alloc::vec![0.0; rows];
        for (r, (&i, &s)) in kept.iter().zip(&row_scale).enumerate() {
            y[i] = y_sys[r] / s;
        }
        y
    };

    let objective = strict.then(|| {
        let mut c = alloc::vec![0.0; structural];
        c[cols] = -1.0;
        c
    });
    let outcome = run_simplex(&sys_a, &sys_b, m, structural, objective.as_deref(), feas_tol)?;
    let (z, duals, capped) = match outcome {
        Outcome::Infeasible(y_sys) => {
            return Ok(Feasibility::Infeasible(finish_witness(to_original_y(&y_sys), &av, &bv, rows, cols)));
        }
        Outcome::Optimal(z, duals) => (z, duals, false),
        Outcome::Unbounded => {
            // Unbounded margin: re-solve with the extra row t + slack = 1.
            let width = structural + 1;
            let mut capped_a = alloc::vec![0.0; (m + 1) * width];
            for r in 0..m {
                capped_a[r * width..r * width + structural]
                    .copy_from_slice(&sys_a[r * structural..(r + 1) * structural]);
            }
            capped_a[m * width + cols] = 1.0;
            capped_a[m * width + structural] = 1.0;
            let mut capped_b = sys_b.clone();
            capped_b.push(1.0);
            let mut c = alloc::vec![0.0; width];
            c[cols] = -1.0;
            match run_simplex(&capped_a, &capped_b, m + 1, width, Some(&c), feas_tol)? {
                Outcome::Optimal(z, _) => (z, None, true),
                _ => return Err(Error::NumericalFailure("capped margin problem failed")),
            }
        }
    };

    let t = if strict { z[cols] } else { 0.0 };
    let x: Vec<f64> = (0..cols).map(|j| z[j] + t).collect();
    let mut point = make_point(&x, &av, &bv, rows, cols, capped);
    point.margin_certificate = duals.map(|d| to_original_y(&d));
    if point.residual > 1e3 * tol.eps() * (1.0 + b_scale) {
        return Err(Error::NumericalFailure("simplex solution does not satisfy the equalities"));
    }
    Ok(Feasibility::Feasible(point))
}

fn make_point(x: &[f64], a: &[f64], b: &[f64], rows: usize, cols: usize, capped: bool) -> FeasiblePoint {
    let residual = (0..rows)
        .map(|i| ((0..cols).map(|j| a[i * cols + j] * x[j]).sum::<f64>() - b[i]).abs())
        .fold(0.0, f64::max);
    let margin = x.iter().copied().fold(f64::INFINITY, f64::min);
    FeasiblePoint {
        x: VectorValue::from_parts(x.iter().map(|&v| Scalar::new(v, 0.0)).collect()),
        margin,
        residual,
        margin_capped: capped,
        margin_certificate: None,
    }
}

fn finish_witness(mut y: Vec<f64>, a: &[f64], b: &[f64], rows: usize, cols: usize) -> FarkasWitness {
    let norm = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if norm > 0.0 {
        for v in &mut y {
            *v /= norm;
        }
    }
    let (max_column_product, rhs_product) = farkas_products(&y, a, b, rows, cols);
    FarkasWitness {
        y,
        shift: 0.0,
        max_column_product,
        rhs_product,
    }
}

enum Outcome {
    /// Values of all structural variables, plus phase-2 duals when an
    /// objective was given.
    Optimal(Vec<f64>, Option<Vec<f64>>),
    /// Phase-1 dual vector in the equilibrated row space.
    Infeasible(Vec<f64>),
    Unbounded,
}

/// Dense tableau: `m` constraint rows plus one reduced-cost row. Columns are
/// the structural variables, then one artificial per row, then the rhs.
struct Tableau {
    m: usize,
    structural: usize,
    width: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(a: &[f64], b: &[f64], m: usize, structural: usize) -> Self {
        let width = structural + m + 1;
        let mut t = alloc::vec![0.0; (m + 1) * width];
        for i in 0..m {
            let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..structural {
                t[i * width + j] = flip * a[i * structural + j];
            }
            t[i * width + structural + i] = 1.0;
            t[i * width + width - 1] = flip * b[i];
        }
        let mut tab = Tableau {
            m,
            structural,
            width,
            t,
            basis: (structural..structural + m).collect(),
        };
        // Phase-1 costs: 1 on every artificial.
        let mut cost = alloc::vec![0.0; structural + m];
        for c in cost.iter_mut().skip(structural) {
            *c = 1.0;
        }
        tab.set_costs(&cost);
        tab
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    /// Rewrites the cost row as reduced costs for `cost` under the current basis.
    fn set_costs(&mut self, cost: &[f64]) {
        let w = self.width;
        let m = self.m;
        for j in 0..w {
            let mut z = if j < w - 1 { cost[j] } else { 0.0 };
            for i in 0..m {
                z -= cost[self.basis[i]] * self.t[i * w + j];
            }
            self.t[m * w + j] = z;
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.t[row * w + col];
        for j in 0..w {
            self.t[row * w + j] /= p;
        }
        self.t[row * w + col] = 1.0;
        for i in 0..=self.m {
            if i == row {
                continue;
            }
            let f = self.t[i * w + col];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                self.t[i * w + j] -= f * self.t[row * w + j];
            }
            self.t[i * w + col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Runs Bland-rule pivots over columns `< allowed`. Returns `false` when unbounded.
    fn optimize(&mut self, allowed: usize) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let Some(col) = (0..allowed).find(|&j| self.at(self.m, j) < -COST_EPS) else {
                return Ok(true);
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, col);
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                        if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((row, _)) = best else { return Ok(false) };
            self.pivot(row, col);
        }
        Err(Error::NumericalFailure("simplex pivot limit reached"))
    }

    fn values(&self) -> Vec<f64> {
        let mut z = alloc::vec![0.0; self.structural + self.m];
        for (i, &var) in self.basis.iter().enumerate() {
            z[var] = self.rhs(i);
        }
        z
    }
}

fn run_simplex(a: &[f64], b: &[f64], m: usize, structural: usize, objective: Option<&[f64]>, feas_tol: f64) -> Result<Outcome> {
    let mut tab = Tableau::new(a, b, m, structural);
    if !tab.optimize(structural + m)? {
        return Err(Error::NumericalFailure("phase one reported unbounded"));
    }
    let infeasibility = -tab.at(m, tab.width - 1);
    if infeasibility > feas_tol {
        // y_i = c_art − reduced cost of artificial i, mapped back through the row flips.
        let y = (0..m)
            .map(|i| {
                let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
                flip * (1.0 - tab.at(m, structural + i))
            })
            .collect();
        return Ok(Outcome::Infeasible(y));
    }

    // Drive remaining artificials out of the basis where possible.
    for i in 0..m {
        if tab.basis[i] < structural {
            continue;
        }
        let col = (0..structural)
            .map(|j| (j, tab.at(i, j).abs()))
            .filter(|&(_, v)| v > PIVOT_EPS)
            .fold(None, |best: Option<(usize, f64)>, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            });
        if let Some((j, _)) = col {
            tab.pivot(i, j);
        }
    }

    let mut duals = None;
    if let Some(c) = objective {
        let mut cost = alloc::vec![0.0; structural + m];
        cost[..structural].copy_from_slice(c);
        // Artificials left in redundant rows must never re-enter.
        tab.set_costs(&cost);
        if !tab.optimize(structural)? {
            return Ok(Outcome::Unbounded);
        }
        // Artificial i has cost 0, so its reduced cost is −π_i.
        duals = Some(
            (0..m)
                .map(|i| {
                    let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
                    -flip * tab.at(m, structural + i)
                })
                .collect(),
        );
    }

    let mut z = tab.values();
    polish(&mut z, &tab, a, b, m, structural);
    z.truncate(structural);
    Ok(Outcome::Optimal(z, duals))
}

/// Recomputes basic values from the original rows to shed pivot round-off.
fn polish(z: &mut [f64], tab: &Tableau, a: &[f64], b: &[f64], m: usize, structural: usize) {
    let basis_matrix = MatrixValue::from_fn(m, m, |i, k| {
        let var = tab.basis[k];
        let v = if var < structural {
            a[i * structural + var]
        } else if var - structural == i {
            if b[i] < 0.0 {
                -1.0
            } else {
                1.0
            }
        } else {
            0.0
        };
        Scalar::new(v, 0.0)
    });
    let rhs = MatrixValue::from_fn(m, 1, |i, _| Scalar::new(b[i], 0.0));
    let Ok(sol) = solve(&basis_matrix, &rhs) else { return };
    let fresh: Vec<f64> = (0..m).map(|k| sol.get(k, 0).re).collect();
    if fresh.iter().any(|v| !v.is_finite() || *v < -1e-9) {
        return;
    }
    for (k, &var) in tab.basis.iter().enumerate() {
        z[var] = fresh[k].max(0.0);
    }
}

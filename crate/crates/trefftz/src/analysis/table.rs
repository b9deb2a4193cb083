use std::io::Write;

use crate::geometry::Point;
use crate::planewave::{filter_directions, DirectionSet};

/// Observed rate log(e₀/e₁)/log(h₀/h₁); `None` when undefined.
pub fn rate(h0: f64, e0: f64, h1: f64, e1: f64) -> Option<f64> {
    if !(h0 > 0.0 && h1 > 0.0 && e0 > 0.0 && e1 > 0.0) || h0 == h1 {
        return None;
    }
    let r = (e0 / e1).ln() / (h0 / h1).ln();
    r.is_finite().then_some(r)
}

/// Least-squares line y ≈ a + b·x; returns (b, a, R²).
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let b = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((b, my - b * mx, r2))
}

/// Convergence order fitted over a whole refinement sequence: the slope of
/// log e against log h.
pub fn fitted_rate(h: &[f64], e: &[f64]) -> Option<f64> {
    if e.iter().chain(h).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lh: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let le: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    linear_fit(&lh, &le).map(|(b, _, _)| b)
}

/// DOF count of the unreduced (filtered) method on an n×n Cartesian mesh
/// with 2q+1 equispaced directions.
pub fn original_ndof_cartesian(n: usize, q: usize) -> usize {
    let dirs = DirectionSet::<f64>::equispaced(q);
    let horiz = filter_directions(Point::new(1.0, 0.0), &dirs.dirs).dim();
    let vert = filter_directions(Point::new(0.0, 1.0), &dirs.dirs).dim();
    n * (n + 1) * (horiz + vert)
}

#[derive(Clone, Debug, PartialEq)]
pub enum RowStatus {
    Ok,
    /// Solved, with warnings (residual, near-singular elements, quadrature).
    Flagged(Vec<String>),
    Failed(String),
}

impl RowStatus {
    pub fn from_flags(flags: Vec<String>) -> Self {
        if flags.is_empty() {
            Self::Ok
        } else {
            Self::Flagged(flags)
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self, Self::Failed(_))
    }

    pub fn label(&self) -> String {
        match self {
            Self::Ok => "ok".into(),
            Self::Flagged(f) => f.join(";"),
            Self::Failed(m) => format!("failed: {m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorRow {
    /// Leading columns (e.g. q or refinement level), in header order.
    pub extra: Vec<String>,
    pub h: f64,
    pub ndof: usize,
    pub rel_h1: f64,
    pub rel_l2: f64,
    pub ndof_orig: Option<usize>,
    pub residual: f64,
    pub max_edge_cond: f64,
    pub status: RowStatus,
}

impl ErrorRow {
    pub fn failed(extra: Vec<String>, h: f64, msg: impl Into<String>) -> Self {
        Self {
            extra,
            h,
            ndof: 0,
            rel_h1: f64::NAN,
            rel_l2: f64::NAN,
            ndof_orig: None,
            residual: f64::NAN,
            max_edge_cond: f64::NAN,
            status: RowStatus::Failed(msg.into()),
        }
    }

    /// 100·(1 − N_dof/N_dof,orig).
    pub fn reduction_pct(&self) -> Option<f64> {
        self.ndof_orig.filter(|&o| o > 0 && self.ndof > 0).map(|o| 100.0 * (1.0 - self.ndof as f64 / o as f64))
    }
}

/// Rows of an h-, p- or hp-study in refinement order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ErrorTable {
    pub extra_headers: Vec<String>,
    /// Rows agreeing in the first `series_columns` extra columns form one
    /// refinement series; rates never cross series.
    pub series_columns: usize,
    pub rows: Vec<ErrorRow>,
}

pub const CSV_HEADER: [&str; 11] = [
    "h",
    "ndof",
    "relH1",
    "rateH1",
    "relL2",
    "rateL2",
    "ndof_orig",
    "reduction_pct",
    "residual",
    "max_edge_cond",
    "status",
];

impl ErrorTable {
    pub fn new(extra_headers: Vec<String>) -> Self {
        Self { extra_headers, series_columns: 0, rows: Vec::new() }
    }

    pub fn with_series(mut self, columns: usize) -> Self {
        self.series_columns = columns;
        self
    }

    fn same_series(&self, a: &ErrorRow, b: &ErrorRow) -> bool {
        let n = self.series_columns;
        a.extra.iter().take(n).eq(b.extra.iter().take(n))
    }

    /// Row indices of each series, in order of first appearance.
    pub fn series(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            match out.iter_mut().find(|s| self.same_series(&self.rows[s[0]], r)) {
                Some(s) => s.push(i),
                None => out.push(vec![i]),
            }
        }
        out
    }

    fn rates(&self, pick: impl Fn(&ErrorRow) -> f64) -> Vec<Option<f64>> {
        let mut out = vec![None; self.rows.len()];
        for idx in self.series() {
            for w in idx.windows(2) {
                let (a, b) = (&self.rows[w[0]], &self.rows[w[1]]);
                out[w[1]] = rate(a.h, pick(a), b.h, pick(b));
            }
        }
        out
    }

    pub fn rates_h1(&self) -> Vec<Option<f64>> {
        self.rates(|r| r.rel_h1)
    }

    pub fn rates_l2(&self) -> Vec<Option<f64>> {
        self.rates(|r| r.rel_l2)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let header: Vec<&str> = self.extra_headers.iter().map(String::as_str).chain(CSV_HEADER).collect();
        wr.write_record(&header)?;
        let (rh, rl) = (self.rates_h1(), self.rates_l2());
        let opt = |x: Option<f64>, f: fn(f64) -> String| x.map(f).unwrap_or_default();
        for (i, r) in self.rows.iter().enumerate() {
            let mut rec: Vec<String> = r.extra.clone();
            rec.extend([
                format!("{:.6e}", r.h),
                r.ndof.to_string(),
                format!("{:.6e}", r.rel_h1),
                opt(rh[i], |x| format!("{x:.3}")),
                format!("{:.6e}", r.rel_l2),
                opt(rl[i], |x| format!("{x:.3}")),
                r.ndof_orig.map(|n| n.to_string()).unwrap_or_default(),
                opt(r.reduction_pct(), |x| format!("{x:.2}")),
                format!("{:.3e}", r.residual),
                format!("{:.3e}", r.max_edge_cond),
                r.status.label(),
            ]);
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(h: f64, e: f64) -> ErrorRow {
        ErrorRow {
            extra: vec![],
            h,
            ndof: 10,
            rel_h1: e,
            rel_l2: e,
            ndof_orig: None,
            residual: 0.0,
            max_edge_cond: 1.0,
            status: RowStatus::Ok,
        }
    }

    #[test]
    fn seventh_order_rate() {
        let t = ErrorTable { extra_headers: vec![], series_columns: 0, rows: vec![row(0.5, 1.0), row(0.25, 1.0 / 128.0)] };
        assert!((t.rates_h1()[1].unwrap() - 7.0).abs() < 1e-12);
        assert_eq!(t.rates_h1()[0], None);
    }

    #[test]
    fn rates_stay_within_a_series() {
        let mut a = row(0.5, 1.0);
        a.extra = vec!["x".into()];
        let mut b = row(0.25, 0.25);
        b.extra = vec!["x".into()];
        let mut c = row(0.5, 1.0);
        c.extra = vec!["y".into()];
        let t = ErrorTable { extra_headers: vec!["s".into()], series_columns: 1, rows: vec![a, b, c] };
        let r = t.rates_l2();
        assert!((r[1].unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(r[2], None);
    }

    #[test]
    fn fitted_rate_of_power_law() {
        let h = [0.5, 0.25, 0.125, 0.0625];
        let e: Vec<f64> = h.iter().map(|v: &f64| 3.0 * v.powf(1.5)).collect();
        assert!((fitted_rate(&h, &e).unwrap() - 1.5).abs() < 1e-12);
        let (_, _, r2) = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((r2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_row_has_no_rates() {
        let t = ErrorTable { extra_headers: vec![], series_columns: 0, rows: vec![row(0.5, 1.0)] };
        let csv = t.to_csv_string();
        let line = csv.lines().nth(1).unwrap();
        assert_eq!(line.split(',').nth(3), Some(""));
    }

    #[test]
    fn published_rate_from_error_column() {
        let h = std::f64::consts::SQRT_2 / 4.0;
        let r = rate(h, 1.0540e-3, h / 2.0, 6.1594e-6).unwrap();
        assert!((r - 7.419).abs() < 2e-3, "{r}");
    }

    #[test]
    fn unreduced_cartesian_counts() {
        let n: Vec<usize> = [1, 2, 4, 8, 16, 32].iter().map(|&n| original_ndof_cartesian(n, 7)).collect();
        assert_eq!(n, [48, 144, 480, 1728, 6528, 25344]);
    }

    #[test]
    fn reduction_percentages() {
        let pairs = [(46, 48), (120, 144), (340, 480), (1008, 1728), (3264, 6528), (10560, 25344)];
        let expect = ["4.17", "16.67", "29.17", "41.67", "50.00", "58.33"];
        for ((n, o), e) in pairs.into_iter().zip(expect) {
            let mut r = row(1.0, 1.0);
            r.ndof = n;
            r.ndof_orig = Some(o);
            assert_eq!(format!("{:.2}", r.reduction_pct().unwrap()), e);
        }
    }
}

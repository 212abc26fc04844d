use serde::Serialize;

use crate::decomposition::log_inv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Default,
    LowDegree,
    HighDegree,
}

/// Parameters of one iteration: degree bound D, size bounds L ≤ |S| ≤ U, shrinking rate δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScheduleRow {
    pub d: f64,
    pub l: f64,
    pub u: f64,
    pub delta: f64,
    /// δ before clamping into (0, 1/K].
    pub raw_delta: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseSchedule {
    pub variant: Variant,
    pub beta: f64,
    pub c: u32,
    pub k_const: f64,
    pub rows: Vec<ScheduleRow>,
}

impl DenseSchedule {
    pub fn clamped_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.clamped).count()
    }
}

/// D·log₂(L/D)/L.
pub fn default_delta(d: f64, l: f64) -> f64 {
    d * (l / d).log2() / l
}

fn row(d: f64, l: f64, u: f64, raw: f64, k_const: f64) -> ScheduleRow {
    let cap = 1.0 / k_const;
    let ok = raw > 0.0 && raw <= cap;
    ScheduleRow {
        d,
        l,
        u,
        delta: if ok { raw } else { cap },
        raw_delta: raw,
        clamped: !ok,
    }
}

fn initial(eps: f64, delta: usize) -> (f64, f64, f64) {
    let dl = delta as f64;
    (3.0 * eps * dl, dl / log_inv(eps), (1.0 + 3.0 * eps) * dl)
}

/// (D, L, U) of the next row under the default recurrences.
fn advance(prev: &ScheduleRow, beta: f64) -> (f64, f64, f64) {
    (beta * prev.delta * prev.d, prev.delta * prev.l, beta * prev.delta * prev.u)
}

/// `count` default rows for a layer-i cluster with sparsity εᵢ.
pub fn default_rows(eps: f64, delta: usize, beta: f64, k_const: f64, count: usize) -> Vec<ScheduleRow> {
    let mut rows: Vec<ScheduleRow> = Vec::with_capacity(count);
    for _ in 0..count {
        let (d, l, u) = match rows.last() {
            None => initial(eps, delta),
            Some(prev) => advance(prev, beta),
        };
        rows.push(row(d, l, u, default_delta(d, l), k_const));
    }
    rows
}

/// Default rows for several layers at once, `eps_by_layer` in increasing layer order.
/// Each iteration's δ is raised to the running maximum over lower layers so rates never
/// decrease with the layer.
pub fn layered_default_rows(
    eps_by_layer: &[f64],
    delta: usize,
    beta: f64,
    k_const: f64,
    count: usize,
) -> Vec<Vec<ScheduleRow>> {
    let mut out: Vec<Vec<ScheduleRow>> = vec![Vec::with_capacity(count); eps_by_layer.len()];
    for _ in 0..count {
        let mut floor = 0.0f64;
        for (li, &eps) in eps_by_layer.iter().enumerate() {
            let (d, l, u) = match out[li].last() {
                None => initial(eps, delta),
                Some(prev) => advance(prev, beta),
            };
            let mut r = row(d, l, u, default_delta(d, l), k_const);
            if r.delta < floor {
                r.delta = floor;
            }
            floor = r.delta;
            out[li].push(r);
        }
    }
    out
}

/// Layer-1 table for moderate Δ: 9 default rows, δ⁽¹⁰⁾ = Δ^(−1/20), D⁽¹¹⁾ = c.
pub fn low_degree_rows(eps1: f64, delta: usize, beta: f64, c: u32, k_const: f64) -> DenseSchedule {
    let mut rows = default_rows(eps1, delta, beta, k_const, 9);
    let dl = delta as f64;
    let (d, l, u) = advance(&rows[8], beta);
    rows.push(row(d, l, u, dl.powf(-1.0 / 20.0), k_const));
    let (_, l, u) = advance(&rows[9], beta);
    let d = c as f64;
    rows.push(row(d, l, u, default_delta(d, l), k_const));
    DenseSchedule {
        variant: Variant::LowDegree,
        beta,
        c,
        k_const,
        rows,
    }
}

/// Layer-1 table for large Δ: 13 rows with D floored at log n from row 10 on.
pub fn high_degree_rows(eps1: f64, delta: usize, n: usize, beta: f64, c: u32, k_const: f64) -> DenseSchedule {
    let mut rows = default_rows(eps1, delta, beta, k_const, 9);
    let dl = delta as f64;
    let logd = dl.log2().max(1.0);
    let logn = (n.max(2) as f64).log2();
    let cf = c as f64;

    let (d, l, u) = advance(&rows[8], beta);
    rows.push(row(d.max(logn), l, u, dl.powf(-1.0 / 20.0) * logd.powi(-18), k_const));
    let (_, l, u) = advance(&rows[9], beta);
    rows.push(row(logn, l, u, dl.powf(-1.0 / 20.0) * logn.powf(5.0 * cf), k_const));
    let (_, l, u) = advance(&rows[10], beta);
    rows.push(row(logn, l, u, logn.powf(-3.0 * cf), k_const));
    let (_, l, u) = advance(&rows[11], beta);
    rows.push(row(cf, l, u, default_delta(cf, l), k_const));
    DenseSchedule {
        variant: Variant::HighDegree,
        beta,
        c,
        k_const,
        rows,
    }
}

/// The table-fixed rates of the high-degree schedule (rows 10 to 12) all lie in (0, 1/K].
pub fn high_degree_feasible(s: &DenseSchedule) -> bool {
    s.variant == Variant::HighDegree && s.rows[9..12].iter().all(|r| !r.clamped)
}

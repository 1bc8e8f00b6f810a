use std::cmp::Ordering;

use super::SearchError;
use crate::energetics::EvaluationRecord;

/// `(tcot, payload margin)` of a record that can take part in the front.
fn objectives(r: &EvaluationRecord) -> Option<(f64, f64)> {
    match (r.feasible, r.tcot, r.payload_margin) {
        (true, Some(t), Some(m)) if t.is_finite() && m.is_finite() => Some((t, m)),
        _ => None,
    }
}

/// `a` dominates `b`: no worse on both objectives, better on at least one.
pub fn dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.0 && a.1 >= b.1 && (a.0 < b.0 || a.1 > b.1)
}

/// Nondominated subset for (minimise TCOT, maximise payload margin), ordered
/// by increasing TCOT. Records without both objectives are ignored.
pub fn pareto_front(records: &[EvaluationRecord]) -> Result<Vec<EvaluationRecord>, SearchError> {
    let mut pts: Vec<(usize, (f64, f64))> = records
        .iter()
        .enumerate()
        .filter_map(|(i, r)| objectives(r).map(|o| (i, o)))
        .collect();
    if pts.is_empty() {
        return Err(SearchError::EmptyFront);
    }
    pts.sort_by(|(ia, a), (ib, b)| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal))
            .then(ia.cmp(ib))
    });
    // best margin so far and the lowest TCOT that reached it
    let mut best: Option<(f64, f64)> = None;
    let mut front = Vec::new();
    for (i, (t, m)) in pts {
        let dominated = match best {
            Some((bm, bt)) => bm > m || (bm == m && bt < t),
            None => false,
        };
        if !dominated {
            front.push(records[i].clone());
        }
        if best.is_none_or(|(bm, _)| m > bm) {
            best = Some((m, t));
        }
    }
    Ok(front)
}

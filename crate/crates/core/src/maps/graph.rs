use super::{Family, MapSpec, Shape};
use crate::error::{Error, Result};
use crate::point::{C64, ZERO};

/// Truncated value of the invariant graph `z1 = h(z2)` of a skew product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphValue {
    pub value: C64,
    pub truncation: usize,
    /// `sup|P on K_Q| * |lambda|^{-N} / (|lambda| - 1)`.
    pub error_bound: f64,
}

/// Smallest `N` whose tail bound falls below `tol`.
pub fn default_graph_truncation(lambda_abs: f64, sup_p: f64, tol: f64) -> usize {
    if sup_p == 0.0 {
        return 1;
    }
    let n = ((tol * (lambda_abs - 1.0) / sup_p).ln() / (1.0 / lambda_abs).ln()).ceil();
    n.max(1.0) as usize
}

/// `h_N(z2) = -sum_{j=1..N} lambda^{-j} P(Q^{j-1}(z2))` for a Skew2D map with
/// `|lambda| > 1`. `truncation = None` picks `N` for a tail below `1e-10`.
pub fn analytic_graph(map: &MapSpec, z2: C64, truncation: Option<usize>) -> Result<GraphValue> {
    let Family::Skew2D { lambda, p, q } = map.family() else {
        return Err(Error::Unsupported(
            "analytic_graph needs a Skew2D map".into(),
        ));
    };
    let la = lambda.norm();
    if !(la > 1.0) {
        return Err(Error::InvalidInput(format!(
            "|lambda| = {la} must exceed 1"
        )));
    }
    let sup_p = p.sup_bound_on_disc(q.escape_radius());
    let n = truncation.unwrap_or_else(|| default_graph_truncation(la, sup_p, 1e-10));

    let dom = map.domain();
    let (center, radius) = match dom.shape {
        Shape::Ball => (dom.center[1], dom.radii[0]),
        _ => (dom.center[1], dom.radii[1]),
    };
    let inv = lambda.inv();
    let mut fac = inv;
    let mut w = z2;
    let mut h = ZERO;
    for j in 1..=n {
        if !((w - center).norm() < radius) {
            return Err(Error::Escaped(format!(
                "Q^{}(z2) left V while summing the graph series",
                j - 1
            )));
        }
        h -= fac * p.eval(w);
        w = q.eval(w);
        fac *= inv;
    }
    Ok(GraphValue {
        value: h,
        truncation: n,
        error_bound: sup_p * la.powi(-(n as i32)) / (la - 1.0),
    })
}

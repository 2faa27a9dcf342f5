//! Gauss–Legendre rules, near-singular subdivision and the
//! subtraction-of-singularity treatment of Cauchy-type element integrals.

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

/// Gauss–Legendre rule on [−1, 1], nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn gauss_legendre(order: usize) -> Result<Self> {
        match order {
            0 => Err(Error::Quadrature("rule order must be at least 1".into())),
            1 => Ok(Self {
                nodes: vec![0.0],
                weights: vec![2.0],
            }),
            _ => {
                let rule =
                    GaussLegendre::new(order).map_err(|e| Error::Quadrature(e.to_string()))?;
                let mut pairs = rule.into_node_weight_pairs();
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                // exact mirror symmetry keeps odd integrands at zero
                let n = pairs.len();
                let mut nodes = vec![0.0; n];
                let mut weights = vec![0.0; n];
                for i in 0..n {
                    let j = n - 1 - i;
                    nodes[i] = 0.5 * (pairs[i].0 - pairs[j].0);
                    weights[i] = 0.5 * (pairs[i].1 + pairs[j].1);
                }
                if n % 2 == 1 {
                    nodes[n / 2] = 0.0;
                }
                Ok(Self { nodes, weights })
            }
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Physical abscissae and weights (`J₂` folded in) on `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, w * half))
    }
}

/// Gauss approximation of `∫_a^b f`. Fails on a non-finite sample.
pub fn integrate_regular(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    let mut acc = 0.0;
    for (x, w) in rule.mapped(a, b) {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand at {x}")));
        }
        acc += w * v;
    }
    Ok(acc)
}

/// Split `[a, b]` so pieces shrink geometrically toward `pole` (which lies
/// outside the open interval). Each step halves the piece nearest the pole
/// while it is longer than its distance to the pole, up to `max_levels`.
pub fn graded_pieces(a: f64, b: f64, pole: f64, max_levels: usize) -> Vec<(f64, f64)> {
    let toward_left = (pole - a).abs() <= (pole - b).abs();
    let mut rest = Vec::new();
    let (mut lo, mut hi) = (a, b);
    for _ in 0..max_levels {
        let len = hi - lo;
        let dist = if toward_left {
            (lo - pole).abs()
        } else {
            (hi - pole).abs()
        };
        if len <= dist {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if toward_left {
            rest.push((mid, hi));
            hi = mid;
        } else {
            rest.push((lo, mid));
            lo = mid;
        }
    }
    rest.push((lo, hi));
    if toward_left {
        rest.reverse();
    }
    rest.sort_by(|p, q| p.0.total_cmp(&q.0));
    rest
}

/// Same as [`graded_pieces`] but always performing exactly `levels` bisections.
pub fn bisect_toward(a: f64, b: f64, pole: f64, levels: usize) -> Vec<(f64, f64)> {
    let toward_left = (pole - a).abs() <= (pole - b).abs();
    let (mut lo, mut hi) = (a, b);
    let mut out = Vec::with_capacity(levels + 1);
    for _ in 0..levels {
        let mid = 0.5 * (lo + hi);
        if toward_left {
            out.push((mid, hi));
            hi = mid;
        } else {
            out.push((lo, mid));
            lo = mid;
        }
    }
    out.push((lo, hi));
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    out
}

/// Settings for the singular neighbourhood of a collocation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPolicy {
    /// Half-width of the symmetric interval as a fraction of the distance
    /// from the collocation point to the nearer end of its neighbourhood.
    pub delta_fraction: f64,
    pub gauss_order_singular: usize,
    /// Bisection cap for the regular pieces next to the symmetric interval.
    pub outer_levels: usize,
}

impl Default for SingularPolicy {
    fn default() -> Self {
        Self {
            delta_fraction: 1.0,
            gauss_order_singular: 64,
            outer_levels: 30,
        }
    }
}

impl SingularPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_fraction > 0.0 && self.delta_fraction <= 1.0) {
            return Err(Error::Quadrature(format!(
                "delta_fraction must lie in (0, 1], got {}",
                self.delta_fraction
            )));
        }
        if self.gauss_order_singular == 0 {
            return Err(Error::Quadrature(
                "singular rule order must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceKind {
    /// Plain Gauss on the integrand.
    Regular,
    /// Gauss on `f − h/(ξ − ξ′)`.
    Subtracted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub a: f64,
    pub b: f64,
    pub kind: PieceKind,
}

/// How a singular neighbourhood `[lo, hi] ∋ ξ′` is integrated.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularPlan {
    pub pieces: Vec<Piece>,
    /// The subtracted term contributes `h · log_weight`: zero on a symmetric
    /// interval, a one-sided finite part when `ξ′` sits at an end.
    pub log_weight: f64,
    pub delta: f64,
}

pub fn singular_plan(lo: f64, hi: f64, xi0: f64, policy: &SingularPolicy) -> Result<SingularPlan> {
    policy.validate()?;
    if !(xi0 >= lo && xi0 <= hi && hi > lo) {
        return Err(Error::Quadrature(format!(
            "collocation point {xi0} is outside its neighbourhood [{lo}, {hi}]"
        )));
    }
    let delta = policy.delta_fraction * (xi0 - lo).min(hi - xi0);
    let tiny = 1e-14 * (hi - lo);
    let mut pieces = Vec::new();
    if delta <= tiny {
        // one-sided finite part at an end point
        let log_weight = if xi0 - lo <= hi - xi0 {
            (hi - xi0).ln()
        } else {
            -(xi0 - lo).ln()
        };
        pieces.push(Piece {
            a: lo,
            b: hi,
            kind: PieceKind::Subtracted,
        });
        return Ok(SingularPlan {
            pieces,
            log_weight,
            delta: 0.0,
        });
    }
    if xi0 - delta - lo > tiny {
        for (a, b) in graded_pieces(lo, xi0 - delta, xi0, policy.outer_levels) {
            pieces.push(Piece {
                a,
                b,
                kind: PieceKind::Regular,
            });
        }
    }
    pieces.push(Piece {
        a: xi0 - delta,
        b: xi0,
        kind: PieceKind::Subtracted,
    });
    pieces.push(Piece {
        a: xi0,
        b: xi0 + delta,
        kind: PieceKind::Subtracted,
    });
    if hi - (xi0 + delta) > tiny {
        for (a, b) in graded_pieces(xi0 + delta, hi, xi0, policy.outer_levels) {
            pieces.push(Piece {
                a,
                b,
                kind: PieceKind::Regular,
            });
        }
    }
    Ok(SingularPlan {
        pieces,
        log_weight: 0.0,
        delta,
    })
}

/// Cauchy principal value of `∫_lo^hi f` where `f ~ h_limit/(ξ − ξ′)` near
/// `ξ′`. The caller supplies `h_limit = lim (ξ − ξ′) f(ξ)`.
pub fn integrate_singular(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    xi0: f64,
    h_limit: f64,
    policy: &SingularPolicy,
    regular: &QuadratureRule,
) -> Result<f64> {
    let plan = singular_plan(lo, hi, xi0, policy)?;
    let sing = QuadratureRule::gauss_legendre(policy.gauss_order_singular)?;
    let mut acc = h_limit * plan.log_weight;
    for p in &plan.pieces {
        acc += match p.kind {
            PieceKind::Regular => integrate_regular(&f, p.a, p.b, regular)?,
            PieceKind::Subtracted => {
                integrate_regular(|x| f(x) - h_limit / (x - xi0), p.a, p.b, &sing)?
            }
        };
    }
    Ok(acc)
}

//! The energy functional, its Gateaux derivative, the pointwise equation
//! residual, and the decomposition/scaling comparisons between a function and
//! its sign parts.
//!
//! Power conventions: the coefficient-field term uses `|u|^{2k/m}` and its
//! derivative `|u|^{2k/m−2}·u` (zero at `u = 0`, valid since `2k/m > 1`), and
//! the log integrand `Q|u|^p ln|u|^r` is defined as exactly zero wherever
//! `u = 0` (its limit, since `p > 4`). Both conventions make the energy even
//! in `u` and keep every integrand real for negative values.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{
    cross_terms, gamma, integrate, sobolev_norm_sq, Domain, GraphError, GraphFunction, Region,
    VertexId, WeightedGraph,
};

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("coefficient a must be positive (got {0})")]
    NonPositiveA(f64),
    #[error("coefficient b must be nonnegative (got {0})")]
    NegativeB(f64),
    #[error("coefficient lambda must be nonnegative (got {0})")]
    NegativeLambda(f64),
    #[error("exponent p must exceed 4 (got {0})")]
    BadP(f64),
    #[error("exponent r must be at least 1 (got {0})")]
    BadR(f64),
    #[error("integer exponents must satisfy 1 < 2k/m <= p (got k={k}, m={m}, p={p})")]
    BadPowerRatio { k: u32, m: u32, p: f64 },
    #[error("field {field} must be positive on interior vertex {vertex} (got {value})")]
    NonPositiveField {
        field: &'static str,
        vertex: VertexId,
        value: f64,
    },
    #[error("field {field} is missing interior vertex {vertex}")]
    MissingField {
        field: &'static str,
        vertex: VertexId,
    },
    #[error("nodal ratio is undefined at s = 0")]
    ZeroArgument,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Problem coefficients. `k` and `m` are the integer exponent parameters; the
/// power-law term uses the ratio `2k/m`, which must lie in `(1, p]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelParams {
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
    pub p: f64,
    pub r: f64,
    pub k: u32,
    pub m: u32,
    /// Weight of the logarithmic nonlinearity, positive on the interior.
    pub q_field: BTreeMap<VertexId, f64>,
    /// Weight of the λ power-law term, positive on the interior.
    pub g_field: BTreeMap<VertexId, f64>,
}

impl ModelParams {
    /// Constant fields `Q ≡ q` and `g ≡ g_val` over the interior.
    #[allow(clippy::too_many_arguments)]
    pub fn constant(
        dom: &Domain,
        a: f64,
        b: f64,
        lambda: f64,
        p: f64,
        r: f64,
        k: u32,
        m: u32,
        q: f64,
        g_val: f64,
    ) -> Self {
        let q_field = dom.interior().iter().map(|x| (x.clone(), q)).collect();
        let g_field = dom.interior().iter().map(|x| (x.clone(), g_val)).collect();
        ModelParams {
            a,
            b,
            lambda,
            p,
            r,
            k,
            m,
            q_field,
            g_field,
        }
    }

    /// The power-law exponent `2k/m`.
    pub fn power_ratio(&self) -> f64 {
        2.0 * f64::from(self.k) / f64::from(self.m)
    }

    pub fn validate(&self, dom: &Domain) -> Result<(), EnergyError> {
        if !(self.a > 0.0) {
            return Err(EnergyError::NonPositiveA(self.a));
        }
        if !(self.b >= 0.0) {
            return Err(EnergyError::NegativeB(self.b));
        }
        if !(self.lambda >= 0.0) {
            return Err(EnergyError::NegativeLambda(self.lambda));
        }
        if !(self.p > 4.0) {
            return Err(EnergyError::BadP(self.p));
        }
        if !(self.r >= 1.0) {
            return Err(EnergyError::BadR(self.r));
        }
        if self.k == 0 || self.m == 0 {
            return Err(EnergyError::BadPowerRatio {
                k: self.k,
                m: self.m,
                p: self.p,
            });
        }
        let ratio = self.power_ratio();
        if !(ratio > 1.0 && ratio <= self.p) {
            return Err(EnergyError::BadPowerRatio {
                k: self.k,
                m: self.m,
                p: self.p,
            });
        }
        for (field, map) in [("Q", &self.q_field), ("g", &self.g_field)] {
            for x in dom.interior() {
                match map.get(x) {
                    None => {
                        return Err(EnergyError::MissingField {
                            field,
                            vertex: x.clone(),
                        })
                    }
                    Some(v) if !(*v > 0.0) => {
                        return Err(EnergyError::NonPositiveField {
                            field,
                            vertex: x.clone(),
                            value: *v,
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// The five summands of the energy, plus their signed total
/// `dirichlet + kirchhoff + potential + log_quartic − log_main`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    /// `a/2 ‖u‖²`
    pub dirichlet: f64,
    /// `b/4 ‖u‖⁴`
    pub kirchhoff: f64,
    /// `(m/2k) ∫ λ g |u|^(2k/m) dμ`
    pub potential: f64,
    /// `(r/p²) ∫ Q |u|^p dμ`
    pub log_quartic: f64,
    /// `(1/p) ∫ Q |u|^p ln|u|^r dμ`
    pub log_main: f64,
    pub total: f64,
}

/// `|v|^(ratio−2) · v`, the real-valued power-law term (zero at `v = 0`).
pub(crate) fn power_term(v: f64, ratio: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.abs().powf(ratio - 2.0) * v
    }
}

/// `|v|^(p−2) · v · ln|v|^r`, defined as zero at `v = 0`.
pub(crate) fn log_term(v: f64, p: f64, r: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.abs().powf(p - 2.0) * v * r * v.abs().ln()
    }
}

/// Interior integrals that recur in every functional evaluation.
pub(crate) struct InteriorIntegrals {
    /// `∫ g |u|^(2k/m) dμ`
    pub potential: f64,
    /// `∫ Q |u|^p dμ`
    pub plain_p: f64,
    /// `∫ Q |u|^p ln|u|^r dμ`
    pub log_p: f64,
}

pub(crate) fn interior_integrals(
    graph: &WeightedGraph,
    dom: &Domain,
    params: &ModelParams,
    u: &GraphFunction,
) -> Result<InteriorIntegrals, EnergyError> {
    let ratio = params.power_ratio();
    let mut potential = 0.0;
    let mut plain_p = 0.0;
    let mut log_p = 0.0;
    for x in dom.interior() {
        let mu = graph
            .measure(x)
            .ok_or_else(|| GraphError::UnknownVertex(x.clone()))?;
        let v = u
            .value(x)
            .ok_or_else(|| GraphError::MissingValue(x.clone()))?;
        let q = params.q_field[x];
        let g = params.g_field[x];
        if v != 0.0 {
            let abs = v.abs();
            potential += mu * g * abs.powf(ratio);
            let pow_p = abs.powf(params.p);
            plain_p += mu * q * pow_p;
            log_p += mu * q * pow_p * params.r * abs.ln();
        }
    }
    Ok(InteriorIntegrals {
        potential,
        plain_p,
        log_p,
    })
}

/// Evaluates the energy functional, split into its five summands.
pub fn energy(
    graph: &WeightedGraph,
    dom: &Domain,
    params: &ModelParams,
    u: &GraphFunction,
) -> Result<EnergyBreakdown, EnergyError> {
    params.validate(dom)?;
    let norm_sq = sobolev_norm_sq(graph, dom, u)?;
    let ints = interior_integrals(graph, dom, params, u)?;
    let ratio = params.power_ratio();
    let dirichlet = 0.5 * params.a * norm_sq;
    let kirchhoff = 0.25 * params.b * norm_sq * norm_sq;
    let potential = params.lambda * ints.potential / ratio;
    let log_quartic = params.r / (params.p * params.p) * ints.plain_p;
    let log_main = ints.log_p / params.p;
    Ok(EnergyBreakdown {
        dirichlet,
        kirchhoff,
        potential,
        log_quartic,
        log_main,
        total: dirichlet + kirchhoff + potential + log_quartic - log_main,
    })
}

/// Directional (Gateaux) derivative `⟨I′(u), v⟩`.
pub fn gateaux(
    graph: &WeightedGraph,
    dom: &Domain,
    params: &ModelParams,
    u: &GraphFunction,
    v: &GraphFunction,
) -> Result<f64, EnergyError> {
    params.validate(dom)?;
    let norm_sq = sobolev_norm_sq(graph, dom, u)?;
    let mixed: BTreeMap<VertexId, f64> = dom
        .working_vertices()
        .map(|x| Ok((x.clone(), gamma(graph, dom, u, v, x)?)))
        .collect::<Result<_, GraphError>>()?;
    let grad_pairing = integrate(graph, dom, &mixed, Region::Closure)?;
    let ratio = params.power_ratio();
    let mut lower_order = 0.0;
    for x in dom.interior() {
        let mu = graph
            .measure(x)
            .ok_or_else(|| GraphError::UnknownVertex(x.clone()))?;
        let ux = u.values()[x];
        let vx = v
            .value(x)
            .ok_or_else(|| GraphError::MissingValue(x.clone()))?;
        lower_order += mu
            * (params.lambda * params.g_field[x] * power_term(ux, ratio)
                - params.q_field[x] * log_term(ux, params.p, params.r))
            * vx;
    }
    Ok((params.a + params.b * norm_sq) * grad_pairing + lower_order)
}

/// Pointwise equation residual at every interior vertex:
/// `−(a + b‖u‖²)Δu + λ g |u|^(2k/m−2)u − Q |u|^(p−2)u ln|u|^r`.
///
/// A solution has all entries near zero, and `residual(x)·μ(x)` is the
/// coordinate gradient `⟨I′(u), e_x⟩` by the discrete Green identity.
pub fn residual(
    graph: &WeightedGraph,
    dom: &Domain,
    params: &ModelParams,
    u: &GraphFunction,
) -> Result<BTreeMap<VertexId, f64>, EnergyError> {
    params.validate(dom)?;
    let norm_sq = sobolev_norm_sq(graph, dom, u)?;
    let lap = crate::graph::laplacian(graph, dom, u)?;
    let ratio = params.power_ratio();
    let mut out = BTreeMap::new();
    for x in dom.interior() {
        let ux = u.values()[x];
        let value = -(params.a + params.b * norm_sq) * lap[x]
            + params.lambda * params.g_field[x] * power_term(ux, ratio)
            - params.q_field[x] * log_term(ux, params.p, params.r);
        out.insert(x.clone(), value);
    }
    Ok(out)
}

/// Coordinate gradient: `x ↦ ⟨I′(u), e_x⟩ = μ(x)·residual(x)` on the
/// interior, zero on the boundary. Shares the residual code path so the
/// weak/pointwise relation holds exactly.
pub fn gradient(
    graph: &WeightedGraph,
    dom: &Domain,
    params: &ModelParams,
    u: &GraphFunction,
) -> Result<GraphFunction, EnergyError> {
    let res = residual(graph, dom, params, u)?;
    let values: Vec<(VertexId, f64)> = res
        .into_iter()
        .map(|(x, v)| {
            let mu = graph.measure(&x).expect("residual vertex is in graph");
            (x, mu * v)
        })
        .collect();
    Ok(GraphFunction::from_interior_values(dom, values)?)
}

/// `|lhs − rhs|` measured against one plus the magnitude of every
/// participating term, the scale on which an identity can be expected to
/// hold in floating point.
fn relative_gap(lhs: f64, rhs: f64, term_scale: f64) -> f64 {
    (lhs - rhs).abs() / (1.0 + lhs.abs() + rhs.abs() + term_scale)
}

/// Gaps of the three sign-part decomposition identities (the energy identity
/// and the two derivative pairings), each reported relative to the magnitude
/// of the terms involved. All three vanish up to roundoff for every function.
pub fn decomposition_gaps(
    graph: &WeightedGraph,
    dom: &Domain,
    params: &ModelParams,
    u: &GraphFunction,
) -> Result<(f64, f64, f64), EnergyError> {
    params.validate(dom)?;
    let pos = u.pos_part();
    let neg = u.neg_part();
    let ct = cross_terms(graph, dom, u)?;
    let norm_p = sobolev_norm_sq(graph, dom, &pos)?;
    let norm_m = sobolev_norm_sq(graph, dom, &neg)?;
    let (a, b) = (params.a, params.b);
    let cross_sum = ct.sum();
    let cross_sq = ct.square_sum();
    let cross_prod = ct.product();

    let lhs_energy = energy(graph, dom, params, u)?.total;
    let rhs_energy = energy(graph, dom, params, &pos)?.total
        + energy(graph, dom, params, &neg)?.total
        - 0.5 * a * cross_sum
        + 0.25 * b * cross_sq
        + 0.5 * b * norm_p * norm_m
        + 0.5 * b * cross_prod
        - 0.5 * b * (norm_p + norm_m) * cross_sum;
    let scale = b * (norm_p * norm_p + norm_m * norm_m + norm_p * norm_m + cross_sq)
        + a * (norm_p + norm_m + cross_sum.abs());
    let gap_energy = relative_gap(lhs_energy, rhs_energy, scale);

    let parts = [(&pos, norm_p, norm_m), (&neg, norm_m, norm_p)];
    let mut gaps_deriv = [0.0; 2];
    for (i, (part, own_norm, other_norm)) in parts.iter().enumerate() {
        let lhs = gateaux(graph, dom, params, u, part)?;
        let rhs = gateaux(graph, dom, params, part, part)?
            - 0.5 * a * cross_sum
            + 0.5 * b * cross_sq
            + b * norm_p * norm_m
            + b * cross_prod
            - 1.5 * b * own_norm * cross_sum
            - 0.5 * b * other_norm * cross_sum;
        gaps_deriv[i] = relative_gap(lhs, rhs, scale);
    }
    Ok((gap_energy, gaps_deriv[0], gaps_deriv[1]))
}

/// Surplus (left side minus right side) of the two-parameter scaling
/// comparison between `I(u)` and `I(su⁺ + tu⁻)`:
///
/// ```text
/// I(u) ≥ I(su⁺+tu⁻) + (1−s^p)/p ⟨I′(u),u⁺⟩ + (1−t^p)/p ⟨I′(u),u⁻⟩ + …
/// ```
///
/// with the `a`- and `b`-weighted norm and cross-term corrections. The
/// surplus is nonnegative for all `s, t ≥ 0` and vanishes at `s = t = 1`.
pub fn split_surplus(
    graph: &WeightedGraph,
    dom: &Domain,
    params: &ModelParams,
    u: &GraphFunction,
    s: f64,
    t: f64,
) -> Result<f64, EnergyError> {
    params.validate(dom)?;
    let pos = u.pos_part();
    let neg = u.neg_part();
    let combined = GraphFunction::linear_comb(s, &pos, t, &neg);
    let lhs = energy(graph, dom, params, u)?.total;
    let i_combined = energy(graph, dom, params, &combined)?.total;
    let d_pos = gateaux(graph, dom, params, u, &pos)?;
    let d_neg = gateaux(graph, dom, params, u, &neg)?;
    let norm_p = sobolev_norm_sq(graph, dom, &pos)?;
    let norm_m = sobolev_norm_sq(graph, dom, &neg)?;
    let ct = cross_terms(graph, dom, u)?;
    let (a, b, p) = (params.a, params.b, params.p);
    let sp = s.powf(p);
    let tp = t.powf(p);
    let sq_diff = s * s - t * t;
    let rhs = i_combined
        + (1.0 - sp) / p * d_pos
        + (1.0 - tp) / p * d_neg
        + a * (0.5 * (1.0 - s * s) - (1.0 - sp) / p) * norm_p
        + a * (0.5 * (1.0 - t * t) - (1.0 - tp) / p) * norm_m
        + b * (0.25 * (1.0 - s.powi(4)) - (1.0 - sp) / p) * norm_p * norm_p
        + b * (0.25 * (1.0 - t.powi(4)) - (1.0 - tp) / p) * norm_m * norm_m
        + 0.25 * b * sq_diff * sq_diff * norm_p * norm_m
        + 0.25 * b * sq_diff * sq_diff * ct.product()
        - 0.25 * a * (s - t) * (s - t) * ct.sum()
        + 0.125 * b * sq_diff * sq_diff * ct.square_sum();
    Ok(lhs - rhs)
}

/// Surplus of the single-parameter ray comparison
/// `I(u) ≥ I(tu) + (1−t^p)/p ⟨I′(u),u⟩ + a(…)‖u‖² + b(…)‖u‖⁴`.
pub fn ray_surplus(
    graph: &WeightedGraph,
    dom: &Domain,
    params: &ModelParams,
    u: &GraphFunction,
    t: f64,
) -> Result<f64, EnergyError> {
    params.validate(dom)?;
    let lhs = energy(graph, dom, params, u)?.total;
    let i_scaled = energy(graph, dom, params, &u.scaled(t))?.total;
    let pairing = gateaux(graph, dom, params, u, u)?;
    let norm_sq = sobolev_norm_sq(graph, dom, u)?;
    let (a, b, p) = (params.a, params.b, params.p);
    let tp = t.powf(p);
    let rhs = i_scaled
        + (1.0 - tp) / p * pairing
        + a * (0.5 * (1.0 - t * t) - (1.0 - tp) / p) * norm_sq
        + b * (0.25 * (1.0 - t.powi(4)) - (1.0 - tp) / p) * norm_sq * norm_sq;
    Ok(lhs - rhs)
}

/// The ratio `|s|^(p−2) s ln|s|^r / s³` whose non-monotonicity on `s > 0`
/// separates this nonlinearity from the classically monotone ones.
pub fn nodal_ratio(s: f64, p: f64, r: f64) -> Result<f64, EnergyError> {
    if s == 0.0 {
        return Err(EnergyError::ZeroArgument);
    }
    Ok(s.abs().powf(p - 2.0) * s * (r * s.abs().ln()) / (s * s * s))
}

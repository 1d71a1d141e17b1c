//! Differential geometry of great-circle fields on the unit round S³.
//!
//! Covariant derivatives are central differences of the 0-homogeneous
//! ambient extension `q ↦ X(q/|q|)`, projected to `T_p S³`. The shape
//! operator `β(u) = ∇_u X` is stored as a 2×2 matrix in a positively
//! oriented frame `(u1, u2)` of `X⊥`, with `u2 = j u1`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibration::{vector_field_seeded, FibrationMap};
use crate::linalg::Mat2;
use crate::quat::{cross3_raw, ImagUnitQuaternion, Quaternion, TangentVector, UnitQuaternion, VALIDATION_TOL};
use crate::sampling::CoveredPoint;

type Q = Quaternion<f64>;
type Unit = UnitQuaternion<f64>;
type Im = ImagUnitQuaternion<f64>;
type Tangent = TangentVector<f64>;

/// Spatial finite-difference step.
pub const SPATIAL_STEP: f64 = 1e-5;
/// Step along the flow for derivatives of scalar fields.
pub const FLOW_STEP: f64 = 1e-4;
/// Ricci curvature of a unit vector on the unit round S³, normalized as the
/// mean of the two sectional curvatures through it.
pub const RIC_X: f64 = 1.0;

const STOKES_RADIUS: f64 = 1e-3;
const STOKES_NODES: usize = 12;

/// Evaluates the unit field of a fibration near a known fibre.
#[derive(Debug, Clone, Copy)]
pub struct FieldEvaluator<'a> {
    pub map: &'a FibrationMap,
    /// Seed for the fibre iteration; the default seed when `None`.
    pub hint: Option<Im>,
}

impl<'a> FieldEvaluator<'a> {
    pub fn new(map: &'a FibrationMap, hint: Option<Im>) -> Self {
        Self { map, hint }
    }

    /// `X(q/|q|)`.
    pub fn at(&self, q: Q) -> Result<Tangent> {
        let p = Unit::normalize(q)?;
        vector_field_seeded(self.map, p, self.hint).map(|(x, _)| x)
    }
}

/// `∇_u field` at `p` by central differences with step `h`.
pub fn covariant_derivative<F>(field: F, p: Unit, u: &Tangent, h: f64) -> Result<Tangent>
where
    F: Fn(Unit) -> Result<Tangent>,
{
    if !u.same_base(&Tangent::zero(p)) {
        return Err(Error::BasePointMismatch);
    }
    let plus = field(Unit::normalize(p.get() + u.vec.scale(h))?)?;
    let minus = field(Unit::normalize(p.get() - u.vec.scale(h))?)?;
    Ok(Tangent::project(p, (plus.vec - minus.vec).scale(0.5 / h)))
}

/// Orthonormal frame `(u1, u2)` of `X(p)⊥ ∩ T_p S³` with `(u1, u2, X)` positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerpFrame {
    pub p: Unit,
    pub x: Q,
    pub u1: Q,
    pub u2: Q,
}

impl PerpFrame {
    /// `u1` is the normalized projection of the first basis vector of ℝ⁴ not
    /// nearly in `span{p, X}`; `u2 = j u1`.
    pub fn new(p: Unit, x: &Tangent) -> Result<Self> {
        let xv = x.vec;
        if (xv.norm() - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::NotUnit(xv.norm()));
        }
        let u1 = (0..4)
            .map(|i| Q::basis(i).reject(p.get()).reject(xv))
            .find(|v| v.norm() >= 0.5)
            .and_then(Q::normalized)
            .ok_or_else(|| Error::InvalidFrame("no basis vector transverse to span{p, X}".into()))?;
        let u2 = cross3_raw(p.get(), xv, u1);
        Ok(Self { p, x: xv, u1, u2 })
    }

    pub fn coords(&self, v: Q) -> [f64; 2] {
        [v.dot(self.u1), v.dot(self.u2)]
    }

    pub fn vector(&self, c: [f64; 2]) -> Q {
        self.u1.scale(c[0]) + self.u2.scale(c[1])
    }
}

/// `β = ∇X` restricted to `X⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeOperator {
    pub frame: PerpFrame,
    /// Column `j` holds the frame coordinates of `β(u_j)`.
    pub b: Mat2,
    pub trace: f64,
    pub det: f64,
    pub trace_sq: f64,
}

impl ShapeOperator {
    pub fn from_matrix(frame: PerpFrame, b: Mat2) -> Self {
        Self {
            frame,
            b,
            trace: b.trace(),
            det: b.det(),
            trace_sq: (b * b).trace(),
        }
    }

    /// `β(u)` for an ambient vector `u ∈ X⊥`.
    pub fn apply(&self, u: Q) -> Q {
        self.frame.vector(self.b.apply(self.frame.coords(u)))
    }
}

/// The field of a fibration at one point together with its first-order data.
#[derive(Debug, Clone)]
pub struct FieldAt<'a> {
    eval: FieldEvaluator<'a>,
    pub p: Unit,
    pub x: Tangent,
    pub shape: ShapeOperator,
    /// `∇_{u_i} X` as ambient vectors.
    beta: [Q; 2],
    /// `(q₊, X(q₊), q₋, X(q₋))` with `q± = (p ± h uᵢ)/|p ± h uᵢ|`.
    probes: [(Q, Q, Q, Q); 2],
}

impl<'a> FieldAt<'a> {
    pub fn new(map: &'a FibrationMap, p: Unit, hint: Option<Im>) -> Result<Self> {
        let (x, fibre) = vector_field_seeded(map, p, hint)?;
        let eval = FieldEvaluator::new(map, Some(hint.unwrap_or(fibre)));
        let frame = PerpFrame::new(p, &x)?;
        let h = SPATIAL_STEP;
        let mut beta = [Q::zero(); 2];
        let mut probes = [(Q::zero(), Q::zero(), Q::zero(), Q::zero()); 2];
        for (i, u) in [frame.u1, frame.u2].into_iter().enumerate() {
            let qp = Unit::normalize(p.get() + u.scale(h))?.get();
            let qm = Unit::normalize(p.get() - u.scale(h))?.get();
            let xp = eval.at(qp)?.vec;
            let xm = eval.at(qm)?.vec;
            beta[i] = (xp - xm).scale(0.5 / h).reject(p.get());
            probes[i] = (qp, xp, qm, xm);
        }
        let b = Mat2::from_columns(frame.coords(beta[0]), frame.coords(beta[1]));
        Ok(Self {
            eval,
            p,
            x,
            shape: ShapeOperator::from_matrix(frame, b),
            beta,
            probes,
        })
    }

    /// Fibre parameter seeding evaluations near `p`.
    pub fn fibre_hint(&self) -> Option<Im> {
        self.eval.hint
    }

    pub fn map(&self) -> &'a FibrationMap {
        self.eval.map
    }

    /// `∇_X X`.
    pub fn geodesic_curvature(&self) -> Result<Tangent> {
        covariant_derivative(|q| self.eval.at(q.get()), self.p, &self.x, SPATIAL_STEP)
    }

    /// `dλ(u1, u2) = g((B − Bᵀ)u1, u2)`.
    pub fn dlambda_frame(&self) -> f64 {
        let b = self.shape.b.0;
        b[1][0] - b[0][1]
    }

    /// `dλ(u, w)` as circulation of `λ` around a small loop in the `(u, w)`
    /// plane divided by its area, Richardson-extrapolated in the radius.
    pub fn dlambda_stokes(&self, u: Q, w: Q) -> Result<f64> {
        let rate = |rho: f64| -> Result<f64> {
            let mut sum = 0.0;
            for k in 0..STOKES_NODES {
                let th = 2.0 * PI * k as f64 / STOKES_NODES as f64;
                let (s, c) = th.sin_cos();
                let y = self.p.get() + (u.scale(c) + w.scale(s)).scale(rho);
                let dy = (w.scale(c) - u.scale(s)).scale(rho);
                let r = y.norm();
                let yh = y.scale(1.0 / r);
                let dc = (dy - yh.scale(dy.dot(yh))).scale(1.0 / r);
                sum += self.eval.at(yh)?.vec.dot(dc);
            }
            let circulation = sum * 2.0 * PI / STOKES_NODES as f64;
            Ok(circulation / (PI * rho * rho))
        };
        let fine = rate(STOKES_RADIUS)?;
        let coarse = rate(2.0 * STOKES_RADIUS)?;
        Ok((4.0 * fine - coarse) / 3.0)
    }

    pub fn contact(&self) -> Result<ContactReport> {
        let nabla_xx = self.geodesic_curvature()?.vec;
        let f = &self.shape.frame;
        let reeb_residual = [f.u1, f.u2]
            .iter()
            .zip(self.beta)
            .map(|(u, bu)| (nabla_xx.dot(*u) - bu.dot(self.x.vec)).abs())
            .fold(0.0, f64::max);
        let dlambda_frame = self.dlambda_frame();
        let dlambda_stokes = self.dlambda_stokes(f.u1, f.u2)?;
        Ok(ContactReport {
            lambda_x: self.x.vec.norm_sqr(),
            lambda_x_defect: (self.x.vec.norm_sqr() - 1.0).abs(),
            reeb_residual,
            dlambda_frame,
            dlambda_stokes,
            contact_det: dlambda_frame * dlambda_frame,
        })
    }

    /// `‖B² + Id‖_F`.
    pub fn complex_structure_defect(&self) -> f64 {
        (self.shape.b * self.shape.b + Mat2::IDENTITY).frobenius()
    }

    pub fn conformal(&self) -> ConformalDefect {
        let b = self.shape.b;
        let j = Mat2::QUARTER_TURN;
        let conf3 = (j * b - b * j).frobenius();
        let conf4 = (b + b.transpose() - Mat2::IDENTITY.scale(b.trace())).frobenius();
        let conf5 = (self.lie_derivative_metric() - Mat2::IDENTITY.scale(b.trace())).frobenius();
        ConformalDefect { conf3, conf4, conf5 }
    }

    /// `(L_X g)(uᵢ, uⱼ) = d/dτ g(dφ_τ uᵢ, dφ_τ uⱼ)` at `τ = 0`, with the exact
    /// great-circle flow `φ_τ(q) = q cos τ + X(q) sin τ`, Richardson-extrapolated
    /// in `τ`.
    pub fn lie_derivative_metric(&self) -> Mat2 {
        let h = SPATIAL_STEP;
        let tau = FLOW_STEP;
        let pullback = |t: f64| {
            let (s, c) = t.sin_cos();
            let d: Vec<Q> = self
                .probes
                .iter()
                .map(|&(qp, xp, qm, xm)| ((qp - qm).scale(c) + (xp - xm).scale(s)).scale(0.5 / h))
                .collect();
            Mat2([[d[0].dot(d[0]), d[0].dot(d[1])], [d[1].dot(d[0]), d[1].dot(d[1])]])
        };
        let rate = |t: f64| (pullback(t) - pullback(-t)).scale(0.5 / t);
        (rate(tau).scale(4.0) - rate(2.0 * tau)).scale(1.0 / 3.0)
    }

    /// Point `γ(s) = p cos s + X sin s` on the fibre through `p`.
    pub fn along_fibre(&self, s: f64) -> Result<Unit> {
        let (sn, c) = s.sin_cos();
        Unit::normalize(self.p.get().scale(c) + self.x.vec.scale(sn))
    }

    /// `|X(tr β) + 2 Ric(X) + tr β²|`.
    pub fn key_formula_residual(&self, h_flow: f64) -> Result<f64> {
        let trace_at = |s: f64| -> Result<f64> {
            let q = self.along_fibre(s)?;
            Ok(FieldAt::new(self.eval.map, q, self.eval.hint)?.shape.trace)
        };
        let x_trace = (trace_at(h_flow)? - trace_at(-h_flow)?) / (2.0 * h_flow);
        Ok((x_trace + 2.0 * RIC_X + self.shape.trace_sq).abs())
    }

    pub fn report(&self) -> Result<DefectReport> {
        let contact = self.contact()?;
        let conf = self.conformal();
        Ok(DefectReport {
            geodesibility: self.geodesic_curvature()?.norm(),
            lambda_x_defect: contact.lambda_x_defect,
            reeb_residual: contact.reeb_residual,
            contact_det: contact.contact_det,
            dlambda_frame: contact.dlambda_frame,
            dlambda_stokes: contact.dlambda_stokes,
            div_x: self.shape.trace,
            j_defect: self.complex_structure_defect(),
            conf3: conf.conf3,
            conf4: conf.conf4,
            conf5: conf.conf5,
            key_residual: self.key_formula_residual(FLOW_STEP)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactReport {
    pub lambda_x: f64,
    pub lambda_x_defect: f64,
    /// `max |dλ(X, uᵢ)|`.
    pub reeb_residual: f64,
    pub dlambda_frame: f64,
    pub dlambda_stokes: f64,
    /// `det(dλ|X⊥)` in the frame.
    pub contact_det: f64,
}

impl ContactReport {
    pub fn cross_check(&self) -> f64 {
        (self.dlambda_frame - self.dlambda_stokes).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalDefect {
    /// `‖jB − Bj‖`
    pub conf3: f64,
    /// `‖B + Bᵀ − tr(B) Id‖`
    pub conf4: f64,
    /// `‖L_X g|X⊥ − div(X) g‖`
    pub conf5: f64,
}

impl ConformalDefect {
    pub fn max(&self) -> f64 {
        self.conf3.max(self.conf4).max(self.conf5)
    }

    pub fn min(&self) -> f64 {
        self.conf3.min(self.conf4).min(self.conf5)
    }

    /// Largest excess `confᵢ − 5·confⱼ − 1e-8` over ordered pairs; ≤ 0 when
    /// the three are mutually comparable.
    pub fn comparability_excess(&self) -> f64 {
        let c = [self.conf3, self.conf4, self.conf5];
        let mut worst = f64::NEG_INFINITY;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    worst = worst.max(c[i] - 5.0 * c[j] - 1e-8);
                }
            }
        }
        worst
    }
}

/// Residuals of one covered point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub geodesibility: f64,
    pub lambda_x_defect: f64,
    pub reeb_residual: f64,
    pub contact_det: f64,
    pub dlambda_frame: f64,
    pub dlambda_stokes: f64,
    pub div_x: f64,
    pub j_defect: f64,
    pub conf3: f64,
    pub conf4: f64,
    pub conf5: f64,
    pub key_residual: f64,
}

impl DefectReport {
    pub fn conformal(&self) -> ConformalDefect {
        ConformalDefect {
            conf3: self.conf3,
            conf4: self.conf4,
            conf5: self.conf5,
        }
    }

    pub fn dlambda_cross_check(&self) -> f64 {
        (self.dlambda_frame - self.dlambda_stokes).abs()
    }
}

pub fn shape_operator(map: &FibrationMap, p: Unit) -> Result<ShapeOperator> {
    Ok(FieldAt::new(map, p, None)?.shape)
}

/// `j u`: the unit vector completing `(u, j u, X)` to a positive orthonormal basis.
pub fn apply_j(p: Unit, x: &Tangent, u: &Tangent) -> Result<Tangent> {
    let base = Tangent::zero(p);
    if !x.same_base(&base) || !u.same_base(&base) {
        return Err(Error::BasePointMismatch);
    }
    let d = u.vec.dot(x.vec);
    if d.abs() > VALIDATION_TOL {
        return Err(Error::NotOrthogonal(d));
    }
    if (u.norm() - 1.0).abs() > VALIDATION_TOL || (x.norm() - 1.0).abs() > VALIDATION_TOL {
        return Err(Error::NotUnit(u.norm()));
    }
    Ok(Tangent::project(p, cross3_raw(p.get(), x.vec, u.vec)))
}

pub fn contact_report(map: &FibrationMap, p: Unit) -> Result<ContactReport> {
    FieldAt::new(map, p, None)?.contact()
}

pub fn complex_structure_defect(map: &FibrationMap, p: Unit) -> Result<f64> {
    Ok(FieldAt::new(map, p, None)?.complex_structure_defect())
}

pub fn conformal_defect(map: &FibrationMap, p: Unit) -> Result<ConformalDefect> {
    Ok(FieldAt::new(map, p, None)?.conformal())
}

pub fn key_formula_residual(map: &FibrationMap, p: Unit, h_flow: f64) -> Result<f64> {
    FieldAt::new(map, p, None)?.key_formula_residual(h_flow)
}

/// Full residual set at a covered point, seeded with its generating fibre.
pub fn defect_report(map: &FibrationMap, point: &CoveredPoint) -> Result<DefectReport> {
    FieldAt::new(map, point.p, Some(point.fibre))?.report()
}

/// [`defect_report`] over many points; results keep the input order.
pub fn defect_scan(map: &FibrationMap, points: &[CoveredPoint]) -> Vec<Result<DefectReport>> {
    points.par_iter().map(|c| defect_report(map, c)).collect()
}

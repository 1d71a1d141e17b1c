use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::chart::ChartSpec;
use crate::error::{Error, Result};
use crate::grassmann::GrassPoint;
use crate::linalg::Mat2;
use crate::quat::{ImagUnitQuaternion, Quaternion};

type Im = ImagUnitQuaternion<f64>;
type Q = Quaternion<f64>;

/// Central-difference step for differentials, in chart units.
pub const DIFFERENTIAL_STEP: f64 = 1e-5;

/// One term `c · z^p · z̄^q` of a chart polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartTerm {
    pub p: u32,
    pub q: u32,
    pub coeff: Complex64,
}

impl ChartTerm {
    pub fn new(p: u32, q: u32, re: f64, im: f64) -> Self {
        Self {
            p,
            q,
            coeff: Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapKind {
    Constant(Im),
    ChartPolynomial(Vec<ChartTerm>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    FullSphere,
    /// `{ |z| ≤ radius }` in the domain chart.
    Cap {
        radius: f64,
    },
}

/// A graph map `F` between the Grassmann factors.
///
/// Without `transposed`, `F: S²₋ → S²₊` and the plane over `m` is
/// `(m, F(m))`; with it, `F: S²₊ → S²₋` and the plane over `n` is `(F(n), n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FibrationMap {
    pub kind: MapKind,
    pub domain: Domain,
    pub transposed: bool,
}

/// Differential of a map in the chart frames at `a` and `F(a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Differential {
    pub matrix: Mat2,
    /// Largest first.
    pub singular_values: [f64; 2],
    pub domain_frame: (Q, Q),
    /// Images of the domain frame vectors, tangent at `F(a)`.
    pub images: [Q; 2],
}

impl Differential {
    /// Pushes forward a tangent vector at `a`.
    pub fn push(&self, u: Q) -> Q {
        let (ex, ey) = self.domain_frame;
        self.images[0].scale(u.dot(ex)) + self.images[1].scale(u.dot(ey))
    }
}

impl FibrationMap {
    pub fn constant(value: Im) -> Self {
        Self {
            kind: MapKind::Constant(value),
            domain: Domain::FullSphere,
            transposed: false,
        }
    }

    pub fn polynomial(terms: Vec<ChartTerm>, domain: Domain) -> Self {
        Self {
            kind: MapKind::ChartPolynomial(terms),
            domain,
            transposed: false,
        }
    }

    pub fn with_transposed(mut self, transposed: bool) -> Self {
        self.transposed = transposed;
        self
    }

    pub fn domain_chart(&self) -> ChartSpec {
        if self.transposed {
            ChartSpec::PLUS
        } else {
            ChartSpec::MINUS
        }
    }

    pub fn range_chart(&self) -> ChartSpec {
        if self.transposed {
            ChartSpec::MINUS
        } else {
            ChartSpec::PLUS
        }
    }

    /// `F̂(z)` for chart polynomials.
    pub fn chart_value(terms: &[ChartTerm], z: Complex64) -> Complex64 {
        let zb = z.conj();
        terms.iter().map(|t| t.coeff * z.powu(t.p) * zb.powu(t.q)).sum()
    }

    /// Chart coordinate of a domain point, checked against the domain.
    pub fn domain_coordinate(&self, a: Im) -> Result<Complex64> {
        let z = self.domain_chart().to_chart(a);
        match (self.domain, z) {
            (Domain::Cap { radius }, Some(z)) if z.norm() > radius * (1.0 + 1e-12) => Err(Error::Domain(z.norm())),
            (Domain::Cap { .. }, None) => Err(Error::Domain(f64::INFINITY)),
            (_, Some(z)) => Ok(z),
            (Domain::FullSphere, None) => Err(Error::Domain(f64::INFINITY)),
        }
    }

    /// Nearest point of the domain to `a`. Chart rays through the origin are
    /// geodesics through the cap centre, so the projection is radial in the chart.
    pub fn clamp_to_domain(&self, a: Im) -> Im {
        let Domain::Cap { radius } = self.domain else {
            return a;
        };
        let chart = self.domain_chart();
        match chart.to_chart(a) {
            Some(z) if z.norm() <= radius => a,
            Some(z) => chart.from_chart(z.scale(radius / z.norm())),
            None => chart.from_chart(Complex64::new(radius, 0.0)),
        }
    }

    /// `F(a)`.
    pub fn eval(&self, a: Im) -> Result<Im> {
        match &self.kind {
            MapKind::Constant(v) => {
                if let Domain::Cap { .. } = self.domain {
                    self.domain_coordinate(a)?;
                }
                Ok(*v)
            }
            MapKind::ChartPolynomial(terms) => {
                let z = self.domain_coordinate(a)?;
                Ok(self.range_chart().from_chart(Self::chart_value(terms, z)))
            }
        }
    }

    /// Grassmann label of the fibre over the domain point `a`.
    pub fn grass_point(&self, a: Im) -> Result<GrassPoint<f64>> {
        let b = self.eval(a)?;
        Ok(if self.transposed {
            GrassPoint::new(b, a)
        } else {
            GrassPoint::new(a, b)
        })
    }

    /// `F` at the chart origin of the domain; a reference point of the range.
    pub fn reference_value(&self) -> Im {
        match &self.kind {
            MapKind::Constant(v) => *v,
            MapKind::ChartPolynomial(terms) => self
                .range_chart()
                .from_chart(Self::chart_value(terms, Complex64::new(0.0, 0.0))),
        }
    }

    /// Post-composition with chart conjugation on the range, an
    /// orientation-reversing isometry of the range sphere.
    pub fn sigma_conjugate(&self) -> Self {
        let kind = match &self.kind {
            MapKind::Constant(v) => {
                let [x, y, z] = v.vector();
                MapKind::Constant(Im::normalize(Q::imag(x, -y, z)).expect("unit"))
            }
            MapKind::ChartPolynomial(terms) => MapKind::ChartPolynomial(
                terms
                    .iter()
                    .map(|t| ChartTerm {
                        p: t.q,
                        q: t.p,
                        coeff: t.coeff.conj(),
                    })
                    .collect(),
            ),
        };
        Self {
            kind,
            domain: self.domain,
            transposed: self.transposed,
        }
    }

    /// Differential by central differences in the domain chart.
    pub fn differential(&self, a: Im) -> Result<Differential> {
        let h = DIFFERENTIAL_STEP;
        let z = self.domain_coordinate(a)?;
        if let Domain::Cap { radius } = self.domain {
            if z.norm() + h > radius {
                return Err(Error::Boundary(z.norm()));
            }
        }
        let chart = self.domain_chart();
        let domain_frame = chart.frame(z);
        let images = match &self.kind {
            MapKind::Constant(_) => [Q::zero(), Q::zero()],
            MapKind::ChartPolynomial(terms) => {
                let range = self.range_chart();
                let g = |w: Complex64| range.from_chart(Self::chart_value(terms, w)).get();
                let s = ChartSpec::scale(z);
                let dir = |d: Complex64| (g(z + d) - g(z - d)).scale(1.0 / (2.0 * h * s));
                [dir(Complex64::new(h, 0.0)), dir(Complex64::new(0.0, h))]
            }
        };
        let b = self.eval(a)?;
        let (fx, fy) = self
            .range_chart()
            .frame(self.range_chart().to_chart(b).unwrap_or(Complex64::new(0.0, 0.0)));
        let matrix = Mat2::from_columns(
            [images[0].dot(fx), images[0].dot(fy)],
            [images[1].dot(fx), images[1].dot(fy)],
        );
        Ok(Differential {
            matrix,
            singular_values: matrix.singular_values(),
            domain_frame,
            images,
        })
    }
}

/// `F(m)`.
pub fn eval_map(map: &FibrationMap, m: Im) -> Result<Im> {
    map.eval(m)
}

/// Differential and singular values of `F` at `m`.
pub fn differential(map: &FibrationMap, m: Im) -> Result<Differential> {
    map.differential(m)
}

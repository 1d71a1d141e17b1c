use super::map::FibrationMap;
use crate::error::{Error, Result};
use crate::quat::{conjugate_rotate, ImagUnitQuaternion, TangentVector, UnitQuaternion};

type Im = ImagUnitQuaternion<f64>;
type Unit = UnitQuaternion<f64>;

/// Stopping rule for the fibre iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocateOptions {
    pub max_iter: usize,
    /// Converged once `‖Φ(a) − a‖ ≤ tol`.
    pub tol: f64,
    /// Also converged once the residual stops decreasing below this level
    /// (the rounding floor of `Φ`).
    pub floor: f64,
}

impl LocateOptions {
    pub fn new(max_iter: usize, tol: f64) -> Self {
        Self {
            max_iter,
            tol,
            floor: 0.0,
        }
    }
}

impl Default for LocateOptions {
    /// Converges to full double precision; used by the field evaluators.
    fn default() -> Self {
        Self {
            max_iter: 2000,
            tol: 1e-15,
            floor: 1e-13,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FibreSolution {
    pub fibre: Im,
    pub iterations: usize,
    pub residual: f64,
    /// Residual after each step; filled only by [`locate_fibre_traced`].
    pub residuals: Vec<f64>,
}

/// `Φ_p(a)`: the fibre parameter whose plane through `p` has the other factor `F(a)`.
fn step(map: &FibrationMap, p: Unit, a: Im) -> Result<Im> {
    let b = map.eval(a).map_err(|e| Error::Coverage(e.to_string()))?;
    Ok(if map.transposed {
        conjugate_rotate(p.inverse(), b)
    } else {
        conjugate_rotate(p, b)
    })
}

/// Seed `conjugate_rotate(p, n₀)` built from the reference value of `F`.
pub fn default_seed(map: &FibrationMap, p: Unit) -> Im {
    let b = map.reference_value();
    if map.transposed {
        conjugate_rotate(p.inverse(), b)
    } else {
        conjugate_rotate(p, b)
    }
}

fn iterate(
    map: &FibrationMap,
    p: Unit,
    seed: Option<Im>,
    opts: LocateOptions,
    mut log: Option<&mut Vec<f64>>,
) -> Result<FibreSolution> {
    let mut a = map.clamp_to_domain(seed.unwrap_or_else(|| default_seed(map, p)));
    let mut previous = f64::INFINITY;
    let mut clamped = false;
    for k in 1..=opts.max_iter {
        let next = step(map, p, a)?;
        let residual = (next.get() - a.get()).norm();
        a = map.clamp_to_domain(next);
        clamped = a != next;
        if let Some(log) = log.as_deref_mut() {
            log.push(residual);
        }
        if residual <= opts.tol || (residual <= opts.floor && residual >= previous) {
            // The fixed point itself must lie in the domain.
            map.eval(a).map_err(|e| Error::Coverage(e.to_string()))?;
            return Ok(FibreSolution {
                fibre: a,
                iterations: k,
                residual,
                residuals: Vec::new(),
            });
        }
        previous = residual;
    }
    if clamped {
        return Err(Error::Coverage(format!(
            "fixed-point iteration stalled on the domain boundary (residual {previous:e})"
        )));
    }
    Err(Error::Convergence {
        iterations: opts.max_iter,
        residual: previous,
    })
}

/// Fixed point `a = Φ_p(a)`: the fibre of `graph(F)` through `p`, seeded per
/// [`default_seed`]. Iterates are projected onto the domain; an iteration
/// that stalls on the domain boundary reports a coverage error.
pub fn locate_fibre(map: &FibrationMap, p: Unit, max_iter: usize, tol: f64) -> Result<Im> {
    locate_fibre_seeded(map, p, None, LocateOptions::new(max_iter, tol)).map(|s| s.fibre)
}

pub fn locate_fibre_seeded(
    map: &FibrationMap,
    p: Unit,
    seed: Option<Im>,
    opts: LocateOptions,
) -> Result<FibreSolution> {
    iterate(map, p, seed, opts, None)
}

/// As [`locate_fibre_seeded`], recording every residual.
pub fn locate_fibre_traced(
    map: &FibrationMap,
    p: Unit,
    seed: Option<Im>,
    opts: LocateOptions,
) -> Result<FibreSolution> {
    let mut log = Vec::new();
    let mut sol = iterate(map, p, seed, opts, Some(&mut log))?;
    sol.residuals = log;
    Ok(sol)
}

/// `X(p) = m·p` for the fibre plane `(m, n)` through `p`, together with the
/// domain parameter of that fibre.
pub fn vector_field_seeded(map: &FibrationMap, p: Unit, seed: Option<Im>) -> Result<(TangentVector<f64>, Im)> {
    let sol = locate_fibre_seeded(map, p, seed, LocateOptions::default())?;
    let g = map.grass_point(sol.fibre)?;
    let x = g.m.get() * p.get();
    Ok((TangentVector::project(p, x), sol.fibre))
}

/// The unit great-circle field of `graph(F)` at `p`.
pub fn vector_field(map: &FibrationMap, p: Unit) -> Result<TangentVector<f64>> {
    vector_field_seeded(map, p, None).map(|(x, _)| x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quaternion;

    type Q = Quaternion<f64>;

    #[test]
    fn constant_map_locates_in_one_step() {
        let hopf = FibrationMap::constant(Im::i());
        let sol = locate_fibre_seeded(&hopf, Unit::one(), None, LocateOptions::new(10, 1e-14)).unwrap();
        assert_eq!(sol.fibre, Im::i());
        assert_eq!(sol.iterations, 1);
    }

    #[test]
    fn constant_map_closed_form() {
        let hopf = FibrationMap::constant(Im::i());
        let p = Unit::normalize(Q::new(0.2, -0.7, 0.4, 0.5)).unwrap();
        let a = locate_fibre(&hopf, p, 10, 1e-14).unwrap();
        assert!(a.get().max_abs_diff((p.get() * Q::i() * p.get().conj()).imag_part()) < 1e-15);
        let x = vector_field(&hopf, p).unwrap();
        assert!(x.vec.max_abs_diff(p.get() * Q::i()) < 1e-15);
        assert!(vector_field(&hopf, Unit::one()).unwrap().vec.max_abs_diff(Q::i()) < 1e-15);
    }

    #[test]
    fn non_convergence_is_reported() {
        use crate::fibration::map::{ChartTerm, Domain};
        let conf = FibrationMap::polynomial(vec![ChartTerm::new(0, 1, 0.5, 0.0)], Domain::Cap { radius: 1.0 });
        let p = Unit::normalize(Q::new(0.9, 0.1, 0.2, 0.3)).unwrap();
        let seed = Some(Im::k());
        assert!(matches!(
            locate_fibre_seeded(&conf, p, seed, LocateOptions::new(1, 1e-30)),
            Err(Error::Convergence { iterations: 1, .. })
        ));
    }

    #[test]
    fn iterates_stay_in_the_domain() {
        use crate::fibration::map::{ChartTerm, Domain};
        use crate::sampling::covered_points;
        let gen = FibrationMap::polynomial(
            vec![ChartTerm::new(1, 0, 0.3, 0.0), ChartTerm::new(0, 1, 0.1, 0.0)],
            Domain::Cap { radius: 1.0 },
        );
        for c in covered_points(&gen, 200, 0).unwrap() {
            let a = locate_fibre(&gen, c.p, 2000, 1e-14).unwrap();
            assert!(a.get().max_abs_diff(c.fibre.get()) < 1e-12);
        }
    }

    #[test]
    fn uncovered_point_stalls_on_the_boundary() {
        use crate::fibration::map::Domain;
        use crate::fibration::MapKind;
        // The fibre through 1 is i, far outside the cap around k.
        let small = FibrationMap {
            kind: MapKind::Constant(Im::i()),
            domain: Domain::Cap { radius: 0.1 },
            transposed: false,
        };
        assert!(matches!(
            locate_fibre(&small, Unit::one(), 50, 1e-14),
            Err(Error::Coverage(_))
        ));
    }
}

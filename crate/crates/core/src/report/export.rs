use std::fmt::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibration::FibrationMap;
use crate::geometry::defect_report;
use crate::sampling::{covered_points, fibre_parameters, rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExportKind {
    Field,
    Graph,
    Defects,
}

impl ExportKind {
    pub fn header(self) -> &'static str {
        match self {
            Self::Field => "p0,p1,p2,p3,x0,x1,x2,x3,div_x,j_defect,conf4,status",
            Self::Graph => "m1,m2,m3,n1,n2,n3,status",
            Self::Defects => {
                "p0,p1,p2,p3,geodesibility,lambda_x_defect,reeb_residual,contact_det,dlambda_frame,\
                 dlambda_stokes,div_x,j_defect,conf3,conf4,conf5,key_residual,status"
            }
        }
    }

    fn columns(self) -> usize {
        self.header().split(',').count() - 1
    }
}

impl FromStr for ExportKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "field" => Ok(Self::Field),
            "graph" => Ok(Self::Graph),
            "defects" => Ok(Self::Defects),
            _ => Err(Error::Config(format!("unknown export kind `{s}`"))),
        }
    }
}

fn push_row(out: &mut String, values: &[f64]) {
    for v in values {
        write!(out, "{v:.16e},").expect("write to string");
    }
    out.push_str("ok\n");
}

fn push_failed(out: &mut String, columns: usize, error: &Error) {
    for _ in 0..columns {
        out.push_str("NaN,");
    }
    let status: String = error
        .to_string()
        .chars()
        .map(|c| if c == ',' || c == '\n' { ';' } else { c })
        .collect();
    writeln!(out, "error: {status}").expect("write to string");
}

/// CSV of `count` sample rows; rows that fail carry the error in `status`.
pub fn export_samples(map: &FibrationMap, count: usize, seed: u64, what: ExportKind) -> Result<String> {
    if count == 0 {
        return Err(Error::EmptySample);
    }
    let mut out = String::new();
    out.push_str(what.header());
    out.push('\n');
    match what {
        ExportKind::Graph => {
            let offset = rand::Rng::random_range(&mut rng(seed), 0.0..std::f64::consts::TAU);
            for a in fibre_parameters(map, count, offset) {
                match map.grass_point(a) {
                    Ok(g) => {
                        let (m, n) = (g.m.vector(), g.n.vector());
                        push_row(&mut out, &[m[0], m[1], m[2], n[0], n[1], n[2]]);
                    }
                    Err(e) => push_failed(&mut out, what.columns(), &e),
                }
            }
        }
        ExportKind::Field | ExportKind::Defects => {
            for c in covered_points(map, count, seed)? {
                let p = c.p.get().to_array();
                match defect_report(map, &c).and_then(|d| {
                    let x = crate::fibration::vector_field_seeded(map, c.p, Some(c.fibre))?
                        .0
                        .vec
                        .to_array();
                    Ok((d, x))
                }) {
                    Ok((d, x)) if what == ExportKind::Field => {
                        push_row(
                            &mut out,
                            &[
                                p[0], p[1], p[2], p[3], x[0], x[1], x[2], x[3], d.div_x, d.j_defect, d.conf4,
                            ],
                        );
                    }
                    Ok((d, _)) => push_row(
                        &mut out,
                        &[
                            p[0],
                            p[1],
                            p[2],
                            p[3],
                            d.geodesibility,
                            d.lambda_x_defect,
                            d.reeb_residual,
                            d.contact_det,
                            d.dlambda_frame,
                            d.dlambda_stokes,
                            d.div_x,
                            d.j_defect,
                            d.conf3,
                            d.conf4,
                            d.conf5,
                            d.key_residual,
                        ],
                    ),
                    Err(e) => push_failed(&mut out, what.columns(), &e),
                }
            }
        }
    }
    Ok(out)
}

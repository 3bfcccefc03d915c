//! JSON and plain-text reports.

use std::fmt::Write as _;

use mirror_core::fan::{self, EulerSummandTable, Fan};
use mirror_core::klyachko::{self, CotangentReport};
use mirror_core::mutation::{self, MutationReport};
use mirror_core::polytope::{self, Polytope};
use mirror_core::tropical::{self, TheoremReport};
use mirror_core::LatticeVector;
use serde::Serialize;

use crate::{CliError, Command};

#[derive(Clone, Debug, Serialize)]
pub struct NamedCheck {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PicardSummary {
    pub rank: usize,
    pub torsion: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InfoReport {
    pub n: usize,
    pub polytope: Polytope,
    pub lattice_points: usize,
    pub fano_polytope: Polytope,
    pub fan: Fan,
    pub cone_vertices: Vec<LatticeVector>,
    pub picard: PicardSummary,
    pub checks: Vec<NamedCheck>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DivisorsReport {
    #[serde(flatten)]
    pub table: EulerSummandTable,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub enum Report {
    Info(Box<InfoReport>),
    Divisors(DivisorsReport),
    Cotangent(CotangentReport),
    Theorem(TheoremReport),
    Mutation(MutationReport),
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

fn info(n: usize) -> Result<InfoReport, CliError> {
    let space = fan::projective_space(n).map_err(compute)?;
    let delta = space.polytope().clone();
    let fano = space.fano_polytope().clone();
    let polar_of_delta = polytope::polar_dual(&delta).map_err(compute)?.integral();
    let polar_of_fano = polytope::polar_dual(&fano).map_err(compute)?.integral();
    let picard = fan::picard_quotient(space.fan());
    let checks = vec![
        NamedCheck {
            name: "polytope is reflexive".into(),
            pass: polytope::is_reflexive(&delta),
        },
        NamedCheck {
            name: "polar of polytope is the Fano polytope".into(),
            pass: polar_of_delta.as_ref() == Some(&fano),
        },
        NamedCheck {
            name: "polar of Fano polytope is the polytope".into(),
            pass: polar_of_fano.as_ref() == Some(&delta),
        },
        NamedCheck {
            name: "Fano polytope is Fano".into(),
            pass: polytope::is_fano_polytope(&fano),
        },
        NamedCheck {
            name: "fan is smooth".into(),
            pass: space.fan().is_smooth(),
        },
        NamedCheck {
            name: "Picard group is Z".into(),
            pass: picard.rank() == 1 && picard.torsion().is_empty(),
        },
    ];
    Ok(InfoReport {
        n,
        lattice_points: polytope::lattice_points(&delta).len(),
        polytope: delta,
        fano_polytope: fano,
        fan: space.fan().as_ref().clone(),
        cone_vertices: space.cone_vertices().to_vec(),
        picard: PicardSummary {
            rank: picard.rank(),
            torsion: picard.torsion().iter().map(|t| t.to_string()).collect(),
        },
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}

pub fn build(command: Command, n: usize) -> Result<Report, CliError> {
    Ok(match command {
        Command::Info => Report::Info(Box::new(info(n)?)),
        Command::Divisors => Report::Divisors(DivisorsReport {
            table: fan::euler_summand_table(n).map_err(compute)?,
            pass: true,
        }),
        Command::Cotangent => Report::Cotangent(klyachko::cotangent_report(n).map_err(compute)?),
        Command::EulerCobordism => Report::Theorem(tropical::verify_main_theorem(n).map_err(compute)?),
        Command::Mutate => Report::Mutation(mutation::verify_beilinson_mutation(n).map_err(compute)?),
        Command::Figure => return Err(CliError::Usage("figure is not a report".into())),
    })
}

fn set(v: &[LatticeVector]) -> String {
    let items: Vec<String> = v.iter().map(|m| m.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

impl Report {
    pub fn pass(&self) -> bool {
        match self {
            Report::Info(r) => r.pass,
            Report::Divisors(r) => r.pass,
            Report::Cotangent(r) => r.pass,
            Report::Theorem(r) => r.pass,
            Report::Mutation(r) => r.pass,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = match self {
            Report::Info(r) => serde_json::to_string_pretty(r),
            Report::Divisors(r) => serde_json::to_string_pretty(r),
            Report::Cotangent(r) => serde_json::to_string_pretty(r),
            Report::Theorem(r) => serde_json::to_string_pretty(r),
            Report::Mutation(r) => serde_json::to_string_pretty(r),
        }
        .expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        match self {
            Report::Info(r) => {
                writeln!(w, "P^{}", r.n).unwrap();
                writeln!(w, "polytope vertices: {}", set(r.polytope.vertices())).unwrap();
                writeln!(w, "lattice points: {}", r.lattice_points).unwrap();
                writeln!(w, "Fano polytope vertices: {}", set(r.fano_polytope.vertices())).unwrap();
                writeln!(w, "rays: {}", set(r.fan.rays())).unwrap();
                for (k, v) in r.cone_vertices.iter().enumerate() {
                    writeln!(w, "cone {k}: rays {:?}, vertex {v}", r.fan.cone(k)).unwrap();
                }
                writeln!(w, "Picard rank {}, torsion {:?}", r.picard.rank, r.picard.torsion).unwrap();
                for c in &r.checks {
                    writeln!(w, "{}: {}", c.name, verdict(c.pass)).unwrap();
                }
            }
            Report::Divisors(r) => {
                writeln!(w, "m(psi_i, sigma_k) on P^{}", r.table.n).unwrap();
                for (i, row) in r.table.entries.iter().enumerate() {
                    let cells: Vec<String> = row.iter().map(|m| m.to_string()).collect();
                    writeln!(w, "-V(rho_{i}): {}", cells.join(" ")).unwrap();
                }
            }
            Report::Cotangent(r) => {
                writeln!(w, "weights of the cotangent bundle on P^{}", r.n).unwrap();
                for c in &r.cones {
                    writeln!(
                        w,
                        "sigma_{}: {} sum {} anticanonical {} closed form {} euler {}",
                        c.cone,
                        set(&c.weights),
                        c.weight_sum,
                        verdict(c.anticanonical_match),
                        verdict(c.closed_form_match),
                        verdict(c.euler_multiset_match),
                    )
                    .unwrap();
                }
            }
            Report::Theorem(r) => {
                writeln!(w, "surgered weights vs cotangent weights on P^{}", r.n).unwrap();
                for (k, c) in r.cones.iter().enumerate() {
                    writeln!(
                        w,
                        "sigma_{k} at {}: {} vs {} {}",
                        c.vertex,
                        set(&c.surgered),
                        set(&c.cotangent),
                        verdict(c.matches)
                    )
                    .unwrap();
                }
            }
            Report::Mutation(r) => {
                for c in &r.checks {
                    writeln!(w, "{}: {} = {} {}", c.name, c.lhs.0, c.rhs.0, verdict(c.pass)).unwrap();
                }
            }
        }
        writeln!(w, "{}", verdict(self.pass())).unwrap();
        out
    }
}

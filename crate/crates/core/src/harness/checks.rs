//! Named checks runnable on a built construction.
//!
//! Check names (parameters after the first `:`):
//! `slits`, `vertices`, `llc1`, `llc2`, `allc`, `ahlfors:Q`, `porosity:SET`,
//! `relsep`, `nk`, `quasicircle:SET`, `circle_llc1:SET`, `components`,
//! `ends`, `rank`, `comparison`, `local_isometry:R`, `flatness`,
//! `inclusion`, `cover`.  `SET` is a marked-set name, `outer`, or `@x;y` for
//! the single vertex nearest to `(x, y)`.

use serde::{Deserialize, Serialize};

use crate::boundary::{boundary_components, ends_components_check, rank, ComponentSpace};
use crate::constructions::{partial_sums, registry_counts, Slit};
use crate::error::{Error, Result};
use crate::gluing::{comparison_check, local_isometry_check};
use crate::metric::{ConstantReport, DiscreteSpace, MarkedSet, Ratio, SetKind, Side, VertexId};
use crate::predicates::{
    ahlfors_fit, allc_constant, circle_llc1, inclusion_check, llc1_constant, llc2_constant, median,
    porosity_constant, preimage_cover_check, quasicircle_constant, uniform_rel_sep, SampleSpec,
};

use super::construct::Built;

/// Every accepted check name (before any `:` parameter).
pub const CHECK_NAMES: [&str; 19] = [
    "slits",
    "vertices",
    "llc1",
    "llc2",
    "allc",
    "ahlfors",
    "porosity",
    "relsep",
    "nk",
    "quasicircle",
    "circle_llc1",
    "components",
    "ends",
    "rank",
    "comparison",
    "local_isometry",
    "flatness",
    "inclusion",
    "cover",
];

/// Largest space on which `comparison` scans every source vertex.
pub const FULL_COMPARISON_MAX: usize = 2000;

/// Number of planarity-sum terms reported by `nk`.
pub const NK_TERMS: u32 = 6;

/// A log-log series `(r, mass)` with its fitted slope, for plotting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub construction: String,
    pub check: String,
    pub seed: u64,
    pub radii: Vec<f64>,
    /// Median ball mass over the sampled centres at each radius.
    pub masses: Vec<f64>,
    pub slope: f64,
}

/// Result of running one check.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub value: f64,
    /// Pass/fail verdict of exact checks and of capped searches.
    pub flag: bool,
    pub samples: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub reference: String,
    pub note: String,
    pub series: Option<(Vec<f64>, Vec<f64>, f64)>,
}

impl Outcome {
    fn plain(value: f64, reference: &str) -> Self {
        Outcome {
            value,
            flag: true,
            samples: 1,
            r_min: 0.0,
            r_max: 0.0,
            reference: reference.into(),
            note: String::new(),
            series: None,
        }
    }

    fn from_report(r: &ConstantReport) -> Self {
        Outcome {
            value: ratio(r.value),
            flag: !r.capped && !r.value.is_infinite(),
            samples: r.samples,
            r_min: r.r_min,
            r_max: r.r_max,
            reference: r.reference.clone(),
            note: if r.capped { "search reached its cap".into() } else { String::new() },
            series: None,
        }
    }
}

fn ratio(r: Ratio) -> f64 {
    r.finite().unwrap_or(f64::INFINITY)
}

/// Splits `name:param`.
pub fn split_check(check: &str) -> (&str, Option<&str>) {
    match check.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (check, None),
    }
}

/// Rejects unknown check names and missing parameters.
pub fn validate_check(check: &str) -> Result<()> {
    let (name, param) = split_check(check);
    if !CHECK_NAMES.contains(&name) {
        return Err(Error::Usage(format!("unknown check {check:?}")));
    }
    let needs = matches!(name, "ahlfors" | "porosity" | "quasicircle" | "circle_llc1" | "local_isometry");
    if needs && param.map_or(true, str::is_empty) {
        return Err(Error::Usage(format!("check {name} needs a parameter ({name}:...)")));
    }
    if matches!(name, "ahlfors" | "local_isometry") {
        param.unwrap_or("").parse::<f64>().map_err(|_| Error::Usage(format!("bad parameter in {check:?}")))?;
    }
    Ok(())
}

fn need_space<'a>(built: &'a Built, check: &str) -> Result<&'a DiscreteSpace<f64>> {
    built.space().ok_or_else(|| Error::Usage(format!("check {check} needs a meshed construction")))
}

/// Resolves a set parameter to a marked set.
fn resolve_set(space: &DiscreteSpace<f64>, param: &str) -> Result<MarkedSet> {
    if let Some(point) = param.strip_prefix('@') {
        let (x, y) = point
            .split_once(';')
            .ok_or_else(|| Error::Usage(format!("point {param:?} is not @x;y")))?;
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Usage(format!("bad coordinate {s:?}")));
        let v = space.nearest(parse(x)?, parse(y)?, Side::None);
        return Ok(MarkedSet::new(param, SetKind::Generic, vec![v], 0));
    }
    if param == "outer" {
        if let Some(m) = space.marked_sets().find(|m| m.kind.is_boundary() && m.component == 0) {
            return Ok(m.clone());
        }
    }
    space.marked(param).cloned().ok_or_else(|| Error::Input(format!("no marked set named {param:?}")))
}

/// Components examined by `relsep`: slit circles of slit domains, otherwise
/// every boundary set other than the outer one (component 0).
fn separated_components(built: &Built, space: &DiscreteSpace<f64>) -> Vec<Vec<VertexId>> {
    match built {
        Built::Slit(mesh) => mesh.slit_circles().iter().map(|m| m.ids.clone()).collect(),
        _ => space
            .boundary_sets()
            .into_iter()
            .filter(|m| m.component != 0)
            .map(|m| m.ids.clone())
            .collect(),
    }
}

/// Planarity partial sum `S_K` (`K = NK_TERMS`) of the slit registry at the
/// accumulation corner (or the square's centre) with `r = 1`.
pub fn nk_sum(slits: &[Slit], accumulating: bool) -> Vec<f64> {
    let (px, py) = if accumulating { (0.0, 0.0) } else { (0.5, 0.5) };
    partial_sums(&registry_counts(slits, px, py, 1.0, NK_TERMS), 2.0)
}

/// Runs a validated check.
pub fn run_check(built: &Built, check: &str, spec: &SampleSpec) -> Result<Outcome> {
    validate_check(check)?;
    let (name, param) = split_check(check);
    let param = param.unwrap_or("");
    match name {
        "slits" => match built.slits() {
            Some(s) => Ok(Outcome::plain(s.len() as f64, "slit count")),
            None => Err(Error::Usage("check slits needs a slit construction".into())),
        },
        "nk" => {
            let (slits, acc) = match built {
                Built::Slit(m) => (&m.slits[..], m.accumulation.is_some()),
                Built::Registry { slits, accumulating } => (&slits[..], *accumulating),
                _ => return Err(Error::Usage("check nk needs a slit construction".into())),
            };
            let sums = nk_sum(slits, acc);
            let mut out = Outcome::plain(*sums.last().expect("K+1 terms"), "planarity partial sum");
            out.r_min = 1.0;
            out.r_max = 1.0;
            out.note = format!("S_K = {sums:?}");
            Ok(out)
        }
        "vertices" => Ok(Outcome::plain(need_space(built, check)?.len() as f64, "vertex count")),
        "llc1" => Ok(Outcome::from_report(&llc1_constant(need_space(built, check)?, spec)?)),
        "llc2" => Ok(Outcome::from_report(&llc2_constant(need_space(built, check)?, spec)?)),
        "allc" => Ok(Outcome::from_report(&allc_constant(need_space(built, check)?, spec)?)),
        "ahlfors" => {
            let q: f64 = param.parse().map_err(|_| Error::Usage(format!("bad exponent in {check}")))?;
            let fit = ahlfors_fit(need_space(built, check)?, q, spec)?;
            let slope = fit.report.extra("slope").unwrap_or(f64::NAN);
            let mut out = Outcome::from_report(&fit.report);
            out.value = slope;
            out.note = format!("K = {}", fit.report.value);
            let masses: Vec<f64> = (0..fit.radii.len())
                .map(|i| median(&fit.series.iter().map(|s| s.masses[i]).collect::<Vec<_>>()))
                .collect();
            out.series = Some((fit.radii.clone(), masses, slope));
            Ok(out)
        }
        "porosity" => {
            let space = need_space(built, check)?;
            let set = resolve_set(space, param)?;
            Ok(Outcome::from_report(&porosity_constant(space, &set.ids, spec)?))
        }
        "relsep" => {
            let space = need_space(built, check)?;
            Ok(Outcome::from_report(&uniform_rel_sep(space, &separated_components(built, space))?))
        }
        "quasicircle" | "circle_llc1" => {
            let space = need_space(built, check)?;
            let set = resolve_set(space, param)?;
            let set = if set.cyclic { set } else { cyclic_version(space, set)? };
            let r = if name == "quasicircle" { quasicircle_constant(space, &set)? } else { circle_llc1(space, &set)? };
            Ok(Outcome::from_report(&r))
        }
        "components" => {
            let cs = boundary_components(need_space(built, check)?)?;
            let mut out = Outcome::plain(cs.len() as f64, "boundary components by chains");
            out.flag = cs.cross_check.pass;
            out.note = cs.cross_check.note.clone();
            Ok(out)
        }
        "ends" => {
            let rep = ends_components_check(need_space(built, check)?)?;
            let mut out = Outcome::plain(rep.value("ends").unwrap_or(f64::NAN), "ends correspond to boundary components");
            out.flag = rep.pass;
            out.note = rep.note;
            Ok(out)
        }
        "rank" => {
            let r = rank(&ComponentSpace::from_marked_sets(need_space(built, check)?))?;
            Ok(Outcome::plain(r as f64, "rank of the declared accumulation structure"))
        }
        "comparison" | "local_isometry" | "flatness" => {
            let Built::Glued(g) = built else {
                return Err(Error::Usage(format!("check {name} needs a glued construction")));
            };
            match name {
                "comparison" => {
                    let sources = (g.space.len() > FULL_COMPARISON_MAX).then_some(spec.samples);
                    let rep = comparison_check(g, sources);
                    let mut out = Outcome::plain(rep.value("min_ratio").unwrap_or(f64::NAN), "comparison inequality");
                    out.flag = rep.pass;
                    out.samples = rep.checked;
                    out.note = rep.note;
                    Ok(out)
                }
                "local_isometry" => {
                    let r: f64 = param.parse().map_err(|_| Error::Usage(format!("bad radius in {check}")))?;
                    let rep = local_isometry_check(g, r, Some(spec.samples));
                    let centers = rep.value("centers").unwrap_or(0.0);
                    let mut out = Outcome::plain(centers, "isometry away from the gluing locus");
                    out.flag = rep.pass && centers > 0.0;
                    out.samples = centers as usize;
                    out.r_min = r;
                    out.r_max = r;
                    out.note = if rep.pass { format!("{} pairs exact, {} skipped", rep.checked, rep.skipped) } else { rep.note };
                    Ok(out)
                }
                _ => Ok(Outcome::plain(g.flatness.unwrap_or(f64::NAN), "flatness of the patches")),
            }
        }
        "inclusion" | "cover" => {
            let Built::Slit(mesh) = built else {
                return Err(Error::Usage(format!("check {name} needs a slit construction")));
            };
            let r = if name == "inclusion" { inclusion_check(mesh, spec)? } else { preimage_cover_check(mesh, spec, 8.0)? };
            Ok(Outcome::from_report(&r))
        }
        _ => unreachable!("validated above"),
    }
}

/// A marked set put into cycle order by walking its induced adjacency.
fn cyclic_version(space: &DiscreteSpace<f64>, set: MarkedSet) -> Result<MarkedSet> {
    let order = crate::boundary::cycle_order(space, &set).map_err(|(_, why)| Error::Input(why))?;
    Ok(MarkedSet { ids: order, cyclic: true, ..set })
}

//! Construction specs: a compact textual name for every space the harness
//! can build, with optional on-disk mesh reuse.
//!
//! Grammar (`m` is the resolution exponent, `h = 2^-m`):
//!
//! | spec | space |
//! |------|-------|
//! | `square(m)` | the plain unit square |
//! | `Q(n,m)`, `carpet(n,m)` | slit domain / slit-carpet stage `n` |
//! | `Qinf(n,m)`, `R(n,m)` | graded truncation of the accumulating domain |
//! | `Qinf(n)`, `Q(n)`, `R(n)` | slit registry only (no mesh) |
//! | `corner(n,level,m)` | rescaled corner `level` of `Qinf(n,m)` |
//! | `circles(m;x,y,r;…)` | unit square minus round disks |
//! | `circle(k)` | round circle with `k` vertices |
//! | `ellipse(k,a,b)` | closed polygon on an ellipse |
//! | `filled(<spec>)` | slit domain with every slit capped |
//! | `twosquares(L)` | two 9×9 unit squares glued by `x ↦ L·x` on the bottom edge |
//! | `file(path)` | mesh JSON on disk |

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::constructions::{
    ellipse_points, from_space, gen_circle_domain, gen_closed_polygon, gen_q, gen_q_inf, gen_r, gen_round_circle,
    gen_slit_carpet, q_slits, r_slits, rescaled_corner, Disk, Slit, SlitDomainMesh,
};
use crate::error::{Error, Result};
use crate::gluing::{fill_slits, glue, GluedSpace, GluingInstance};
use crate::metric::io::{read_mesh, write_mesh};
use crate::metric::{DiscreteSpace, MetricKind, SetKind, Side, VertexId};

/// Slit family selector for registry-only and meshed specs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlitFamily {
    Q,
    Carpet,
    Qinf,
    R,
}

/// A parsed construction spec.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstructionSpec {
    Square { m: u32 },
    Slit { family: SlitFamily, n: u32, m: u32 },
    Registry { family: SlitFamily, n: u32 },
    Corner { n: u32, level: u32, m: u32 },
    Circles { m: u32, disks: Vec<Disk> },
    Circle { k: usize },
    Ellipse { k: usize, a: f64, b: f64 },
    Filled(Box<ConstructionSpec>),
    TwoSquares { l: f64 },
    File(PathBuf),
}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}

fn num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Usage(format!("cannot parse {what} from {s:?}")))
}

impl FromStr for ConstructionSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (head, body) = match text.find('(') {
            Some(i) if text.ends_with(')') => (&text[..i], &text[i + 1..text.len() - 1]),
            _ => return usage(format!("construction {text:?} is not of the form name(args)")),
        };
        let args: Vec<&str> = if body.trim().is_empty() { Vec::new() } else { body.split(',').collect() };
        let family = match head {
            "Q" | "gen_Q" => Some(SlitFamily::Q),
            "carpet" => Some(SlitFamily::Carpet),
            "Qinf" | "gen_Q_inf" => Some(SlitFamily::Qinf),
            "R" | "gen_R" => Some(SlitFamily::R),
            _ => None,
        };
        if let Some(family) = family {
            return match args.as_slice() {
                [n] => Ok(ConstructionSpec::Registry { family, n: num(n, "generation")? }),
                [n, m] => Ok(ConstructionSpec::Slit { family, n: num(n, "generation")?, m: num(m, "resolution")? }),
                _ => usage(format!("{head} takes (n) or (n,m)")),
            };
        }
        match (head, args.as_slice()) {
            ("square", [m]) => Ok(ConstructionSpec::Square { m: num(m, "resolution")? }),
            ("corner", [n, level, m]) => Ok(ConstructionSpec::Corner {
                n: num(n, "generation")?,
                level: num(level, "level")?,
                m: num(m, "resolution")?,
            }),
            ("circle", [k]) => Ok(ConstructionSpec::Circle { k: num(k, "vertex count")? }),
            ("ellipse", [k, a, b]) => {
                Ok(ConstructionSpec::Ellipse { k: num(k, "vertex count")?, a: num(a, "axis")?, b: num(b, "axis")? })
            }
            ("twosquares", [l]) => Ok(ConstructionSpec::TwoSquares { l: num(l, "stretch")? }),
            ("circles", _) => {
                let mut parts = body.split(';');
                let m = num(parts.next().unwrap_or(""), "resolution")?;
                let mut disks = Vec::new();
                for p in parts {
                    let xs: Vec<&str> = p.split(',').collect();
                    if xs.len() != 3 {
                        return usage(format!("disk {p:?} is not x,y,r"));
                    }
                    disks.push((num(xs[0], "x")?, num(xs[1], "y")?, num(xs[2], "radius")?));
                }
                Ok(ConstructionSpec::Circles { m, disks })
            }
            ("filled", _) => Ok(ConstructionSpec::Filled(Box::new(body.parse()?))),
            ("file", _) => Ok(ConstructionSpec::File(PathBuf::from(body.trim()))),
            _ => usage(format!("unknown construction {text:?}")),
        }
    }
}

impl fmt::Display for SlitFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SlitFamily::Q => "Q",
            SlitFamily::Carpet => "carpet",
            SlitFamily::Qinf => "Qinf",
            SlitFamily::R => "R",
        })
    }
}

impl fmt::Display for ConstructionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionSpec::Square { m } => write!(f, "square({m})"),
            ConstructionSpec::Slit { family, n, m } => write!(f, "{family}({n},{m})"),
            ConstructionSpec::Registry { family, n } => write!(f, "{family}({n})"),
            ConstructionSpec::Corner { n, level, m } => write!(f, "corner({n},{level},{m})"),
            ConstructionSpec::Circles { m, disks } => {
                write!(f, "circles({m}")?;
                for (x, y, r) in disks {
                    write!(f, ";{x},{y},{r}")?;
                }
                f.write_str(")")
            }
            ConstructionSpec::Circle { k } => write!(f, "circle({k})"),
            ConstructionSpec::Ellipse { k, a, b } => write!(f, "ellipse({k},{a},{b})"),
            ConstructionSpec::Filled(inner) => write!(f, "filled({inner})"),
            ConstructionSpec::TwoSquares { l } => write!(f, "twosquares({l})"),
            ConstructionSpec::File(p) => write!(f, "file({})", p.display()),
        }
    }
}

/// A built construction.
#[derive(Clone, Debug)]
pub enum Built {
    /// Slit domain with its registry.
    Slit(SlitDomainMesh<f64>),
    /// Registry without a mesh.
    Registry { slits: Vec<Slit>, accumulating: bool },
    /// Any other space.
    Plain(DiscreteSpace<f64>),
    /// A glued space with its pieces.
    Glued(GluedSpace<f64>),
}

impl Built {
    /// The metric space, when the construction has one.
    pub fn space(&self) -> Option<&DiscreteSpace<f64>> {
        match self {
            Built::Slit(m) => Some(&m.space),
            Built::Plain(s) => Some(s),
            Built::Glued(g) => Some(&g.space),
            Built::Registry { .. } => None,
        }
    }

    pub fn slits(&self) -> Option<&[Slit]> {
        match self {
            Built::Slit(m) => Some(&m.slits),
            Built::Registry { slits, .. } => Some(slits),
            _ => None,
        }
    }
}

fn h_of(m: u32) -> f64 {
    2f64.powi(-(m as i32))
}

/// Builds constructions, reusing meshes stored under a cache directory.
#[derive(Clone, Debug, Default)]
pub struct Builder {
    pub cache: Option<PathBuf>,
}

impl Builder {
    pub fn new(cache: Option<PathBuf>) -> Self {
        Builder { cache }
    }

    /// Builder configured from the `CARPETLAB_CACHE` environment variable.
    pub fn from_env() -> Self {
        Builder { cache: std::env::var_os("CARPETLAB_CACHE").map(PathBuf::from) }
    }

    pub fn build(&self, spec: &ConstructionSpec) -> Result<Built> {
        match spec {
            ConstructionSpec::Registry { family, n } => Ok(match family {
                SlitFamily::Q | SlitFamily::Carpet => Built::Registry { slits: q_slits(*n), accumulating: false },
                SlitFamily::Qinf | SlitFamily::R => Built::Registry { slits: r_slits(*n), accumulating: true },
            }),
            ConstructionSpec::Slit { .. } | ConstructionSpec::Corner { .. } | ConstructionSpec::Square { .. } => {
                Ok(Built::Slit(self.slit_mesh(spec)?))
            }
            ConstructionSpec::Filled(inner) => {
                let mesh = match self.build(inner)? {
                    Built::Slit(mesh) => mesh,
                    _ => return usage(format!("filled() needs a slit domain, got {inner}")),
                };
                Ok(Built::Glued(fill_slits(&mesh)?))
            }
            ConstructionSpec::TwoSquares { l } => Ok(Built::Glued(two_squares(*l)?)),
            ConstructionSpec::File(path) => {
                let space = read_mesh::<f64>(path)?;
                if space.marked_sets().any(|m| m.kind == SetKind::Slit) {
                    Ok(Built::Slit(from_space(space)?))
                } else {
                    Ok(Built::Plain(space))
                }
            }
            _ => Ok(Built::Plain(self.cached(spec, || plain_space(spec))?)),
        }
    }

    fn slit_mesh(&self, spec: &ConstructionSpec) -> Result<SlitDomainMesh<f64>> {
        let fresh = || -> Result<SlitDomainMesh<f64>> {
            match *spec {
                ConstructionSpec::Square { m } => gen_q(0, h_of(m)),
                ConstructionSpec::Slit { family, n, m } => match family {
                    SlitFamily::Q => gen_q(n, h_of(m)),
                    SlitFamily::Carpet => gen_slit_carpet(n, h_of(m)),
                    SlitFamily::Qinf => gen_q_inf(n, h_of(m)),
                    SlitFamily::R => gen_r(n, h_of(m)),
                },
                ConstructionSpec::Corner { n, level, m } => rescaled_corner(&gen_q_inf(n, h_of(m))?, level),
                _ => unreachable!("slit_mesh called on a non-slit spec"),
            }
        };
        // A cached mesh loses the registry's generation data, so slit meshes
        // are only read from the cache, never rebuilt from it silently.
        match self.cache_path(spec) {
            Some(path) if path.exists() => from_space(read_mesh(&path)?),
            Some(path) => {
                let mesh = fresh()?;
                store(&mesh.space, &path)?;
                Ok(mesh)
            }
            None => fresh(),
        }
    }

    fn cached(&self, spec: &ConstructionSpec, make: impl FnOnce() -> Result<DiscreteSpace<f64>>) -> Result<DiscreteSpace<f64>> {
        match self.cache_path(spec) {
            Some(path) if path.exists() => read_mesh(&path),
            Some(path) => {
                let space = make()?;
                store(&space, &path)?;
                Ok(space)
            }
            None => make(),
        }
    }

    /// Cache file for a spec: its canonical text with unsafe characters
    /// replaced.
    pub fn cache_path(&self, spec: &ConstructionSpec) -> Option<PathBuf> {
        let dir = self.cache.as_ref()?;
        let name: String = spec
            .to_string()
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
            .collect();
        Some(dir.join(format!("{name}.json")))
    }
}

/// Writes through a temporary file so concurrent readers never see a
/// partial mesh.
fn store(space: &DiscreteSpace<f64>, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    write_mesh(space, &tmp)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn plain_space(spec: &ConstructionSpec) -> Result<DiscreteSpace<f64>> {
    match spec {
        ConstructionSpec::Circles { m, disks } => gen_circle_domain(disks, h_of(*m)),
        ConstructionSpec::Circle { k } => gen_round_circle(*k),
        ConstructionSpec::Ellipse { k, a, b } => gen_closed_polygon(&ellipse_points(*k, *a, *b), MetricKind::Euclidean),
        _ => usage(format!("{spec} is not a plain space")),
    }
}

/// Unit square meshed as a 9×9 8-neighbour grid of pitch 1/8, with the
/// outer boundary marked.
fn unit_square() -> Result<DiscreteSpace<f64>> {
    gen_q::<f64>(0, 0.125).map(|m| m.space)
}

/// Two unit squares glued along `f(x, 0) = (L·x, 0)` for the base bottom
/// vertices with `x <= 1/L`, declared `L`-bi-Lipschitz.
pub fn two_squares(l: f64) -> Result<GluedSpace<f64>> {
    glue(&two_squares_instance(l, l)?)
}

/// The two-squares instance with stretch `l` and declared constant
/// `declared`; [`GluingInstance::add_patch`] rejects it when
/// `declared < l`.
pub fn two_squares_instance(l: f64, declared: f64) -> Result<GluingInstance<f64>> {
    if !(l >= 1.0) || (8.0 / l).fract() != 0.0 {
        return usage(format!("twosquares stretch {l} must be >= 1 and divide 8"));
    }
    let base = unit_square()?;
    let patch = unit_square()?;
    let find = |s: &DiscreteSpace<f64>, x: f64| -> VertexId { s.nearest(x, 0.0, Side::None) };
    let pairs: Vec<(VertexId, VertexId)> = (0..=(8.0 / l) as u32)
        .map(|i| {
            let x = i as f64 / 8.0;
            (find(&base, x), find(&patch, l * x))
        })
        .collect();
    let mut inst = GluingInstance::new(base, declared)?;
    inst.add_patch(patch, pairs)?;
    Ok(inst)
}

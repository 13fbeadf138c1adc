use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use extremal_rays::comb_counterexample::{build_comb, comb_sets};
use extremal_rays::flat_geometry::io::domain_from_json;
use extremal_rays::flat_geometry::{
    build_rectangle, build_slit_rectangle, BoundarySet, Facing, Point,
};
use extremal_rays::scalar::parse_exact;
use extremal_rays::{Exact, ExactDomain};
use num_complex::Complex64;
use num_traits::Signed;

/// Raised for malformed configuration; maps to exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Modulus,
    #[value(alias = "trajectory")]
    #[serde(alias = "trajectory")]
    Trace,
    Lamination,
    Ray,
    CombCertify,
    LiouvilleGap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    Square,
    Rectangle,
    Lshape,
    SlitRect,
    Comb,
}

/// Experiment parameters. Every field may also come from the config file;
/// flags win.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Experiment kind (or `kind = ...` in the config file)
    #[arg(value_enum)]
    pub kind: Option<Kind>,
    /// TOML file with the same keys as the flags
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    /// Slit domain JSON file
    #[arg(long)]
    pub domain: Option<PathBuf>,
    /// Boundary set: left, right, top, bottom, edge:I[:T0:T1], comb set names
    /// (E, F, E', F', E1, E2, F1, F2), joined with `+`
    #[arg(long)]
    pub e: Option<String>,
    #[arg(long)]
    pub f: Option<String>,
    /// Cell width, e.g. 1/512 or 2^-9
    #[arg(long)]
    pub h: Option<String>,
    /// Squeeze schedule: `2^-1..2^-8` or a comma list
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub kmax: Option<u32>,
    /// Comb level of named sets
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Polynomial coefficients, constant first, e.g. `1,0,0.5+0.1i`
    #[arg(long)]
    pub qd: Option<String>,
    /// Start point of a trajectory, e.g. `0.1-0.2i`
    #[arg(long)]
    pub z0: Option<String>,
    /// φ-length budget per direction
    #[arg(long)]
    pub budget: Option<f64>,
    /// Rectangle width
    #[arg(long)]
    pub width: Option<String>,
    /// Slit rectangle `a,b,c,n`
    #[arg(long)]
    pub slits: Option<String>,
    /// Moduli for liouville-gap, comma separated
    #[arg(long)]
    pub moduli: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "EXTREMAL_RAYS_THREADS")]
    pub threads: Option<usize>,
    /// Also write SVG plots
    #[arg(long)]
    #[serde(default)]
    pub svg: bool,
}

macro_rules! merge {
    ($dst:ident, $src:ident; $($field:ident),*) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field; } )*
    };
}

impl Params {
    /// Fills unset fields from the config file, if any.
    pub fn resolve(mut self) -> Result<Self, UsageError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
        let file: Params =
            toml::from_str(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        merge!(self, file; kind, builtin, domain, e, f, h, eps, kmax, k, seed, samples, qd, z0, budget,
               width, slits, moduli, out, threads);
        self.svg |= file.svg;
        if let (Some(d), Some(base)) = (&self.domain, path.parent()) {
            if d.is_relative() && !d.exists() {
                self.domain = Some(base.join(d));
            }
        }
        Ok(self)
    }

    pub fn kind(&self) -> Result<Kind, UsageError> {
        self.kind
            .ok_or_else(|| UsageError("no experiment kind given".into()))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn kmax(&self) -> u32 {
        self.kmax.unwrap_or(4)
    }

    pub fn h(&self, default: &str) -> Result<Exact, UsageError> {
        let s = self.h.as_deref().unwrap_or(default);
        let h = exact(s)?;
        if h <= Exact::from_integer(0) {
            return usage("h must be positive");
        }
        Ok(h)
    }

    /// The configured domain, if any.
    pub fn flat_domain(&self) -> Result<Option<ExactDomain>, UsageError> {
        if let Some(path) = &self.domain {
            if self.builtin.is_some() {
                return usage("give either --builtin or --domain");
            }
            let text = std::fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
            return domain_from_json(&text)
                .map(Some)
                .map_err(|e| UsageError(e.to_string()));
        }
        let Some(b) = self.builtin else {
            return Ok(None);
        };
        let one = Exact::from_integer(1);
        let dom = match b {
            Builtin::Square => build_rectangle(one, one),
            Builtin::Rectangle => {
                let w = exact(self.width.as_deref().unwrap_or("2"))?;
                build_rectangle(w, one)
            }
            Builtin::Lshape => lshape(),
            Builtin::SlitRect => {
                let spec = self.slits.as_deref().unwrap_or("1,1,1/2,4");
                let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
                let [a, b, c, n] = parts[..] else {
                    return usage("--slits takes a,b,c,n");
                };
                let n: usize = n
                    .parse()
                    .map_err(|_| UsageError(format!("bad slit count '{n}'")))?;
                build_slit_rectangle(exact(a)?, exact(b)?, exact(c)?, n)
            }
            Builtin::Comb => build_comb(self.kmax()),
        };
        dom.map(Some).map_err(|e| UsageError(e.to_string()))
    }

    pub fn domain_required(&self) -> Result<ExactDomain, UsageError> {
        self.flat_domain()?
            .ok_or_else(|| UsageError("this kind needs --builtin or --domain".into()))
    }

    /// Parses a boundary set spec on `dom`.
    pub fn set(&self, dom: &ExactDomain, spec: &str) -> Result<BoundarySet<Exact>, UsageError> {
        let mut acc: Option<BoundarySet<Exact>> = None;
        for part in spec.split('+').map(str::trim) {
            let s = self.single_set(dom, part)?;
            acc = Some(match acc {
                None => s,
                Some(a) => a.union(dom, &s).map_err(|e| UsageError(e.to_string()))?,
            });
        }
        acc.ok_or_else(|| UsageError("empty boundary set".into()))
    }

    fn single_set(&self, dom: &ExactDomain, s: &str) -> Result<BoundarySet<Exact>, UsageError> {
        let err = |e: extremal_rays::Error| UsageError(format!("boundary set '{s}': {e}"));
        let facing = match s.to_ascii_lowercase().as_str() {
            "left" => Some(Facing::Left),
            "right" => Some(Facing::Right),
            "top" => Some(Facing::Top),
            "bottom" => Some(Facing::Bottom),
            _ => None,
        };
        if let Some(fc) = facing {
            return BoundarySet::facing(dom, fc).map_err(err);
        }
        if let Some(rest) = s.strip_prefix("edge:") {
            let parts: Vec<&str> = rest.split(':').collect();
            let i: usize = parts[0]
                .parse()
                .map_err(|_| UsageError(format!("bad edge index in '{s}'")))?;
            if i >= dom.edge_count() {
                return usage(format!("edge {i} out of range"));
            }
            let (p, q) = dom.edge(i);
            let len = (q.x - p.x).abs() + (q.y - p.y).abs();
            let (t0, t1) = match parts.len() {
                1 => (Exact::from_integer(0), len),
                3 => (exact(parts[1])?, exact(parts[2])?),
                _ => return usage(format!("'{s}' is not edge:I or edge:I:T0:T1")),
            };
            return BoundarySet::on_edge(dom, i, t0, t1).map_err(err);
        }
        if self.builtin != Some(Builtin::Comb) {
            return usage(format!("unknown boundary set '{s}'"));
        }
        let sets = comb_sets(dom, self.kmax(), self.k.unwrap_or(1)).map_err(err)?;
        Ok(match s {
            "E" => sets.e,
            "F" => sets.f,
            "E'" => sets.e_prime,
            "F'" => sets.f_prime,
            "E1" => sets.e1,
            "E2" => sets.e2,
            "F1" => sets.f1,
            "F2" => sets.f2,
            _ => return usage(format!("unknown boundary set '{s}'")),
        })
    }

    /// Squeeze schedule, strictly decreasing.
    pub fn eps(&self) -> Result<Vec<Exact>, UsageError> {
        let s = self.eps.as_deref().unwrap_or("2^-1..2^-6");
        if let Some((a, b)) = s.split_once("..") {
            let exp = |t: &str| -> Result<i32, UsageError> {
                let e = t
                    .trim()
                    .strip_prefix("2^")
                    .and_then(|x| x.parse::<i32>().ok());
                e.ok_or_else(|| UsageError(format!("range ends must be powers 2^-j, got '{t}'")))
            };
            let (ea, eb) = (exp(a)?, exp(b)?);
            if ea > 0 || eb > ea || eb < -40 {
                return usage("range must run 2^-i..2^-j with 0 ≤ i ≤ j ≤ 40");
            }
            return Ok((eb..=ea)
                .rev()
                .map(|e| Exact::new(1, 1i64 << (-e)))
                .collect());
        }
        s.split(',').map(|t| exact(t)).collect()
    }

    pub fn qd(&self) -> Result<Vec<Complex64>, UsageError> {
        let s = self.qd.as_deref().unwrap_or("1");
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<Complex64>()
                    .map_err(|_| UsageError(format!("bad coefficient '{t}'")))
            })
            .collect()
    }

    pub fn z0(&self) -> Result<Complex64, UsageError> {
        let s = self.z0.as_deref().unwrap_or("0");
        s.trim()
            .parse()
            .map_err(|_| UsageError(format!("bad point '{s}'")))
    }

    pub fn moduli(&self) -> Result<Vec<f64>, UsageError> {
        let s = self.moduli.as_deref().unwrap_or("2,3,4,5,6,7,8");
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|m| *m > 0.0)
                    .ok_or_else(|| UsageError(format!("bad modulus '{t}'")))
            })
            .collect()
    }
}

pub fn exact(s: &str) -> Result<Exact, UsageError> {
    parse_exact(s).ok_or_else(|| UsageError(format!("cannot read '{s}' as an exact number")))
}

/// Unit square minus its top right quarter.
fn lshape() -> extremal_rays::Result<ExactDomain> {
    let q = Exact::new;
    let pts = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)];
    ExactDomain::new(
        pts.iter()
            .map(|&(x, y)| Point::new(q(x, 2), q(y, 2)))
            .collect(),
        Vec::new(),
    )
}

pub fn ensure_dir(dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules() {
        let p = Params {
            eps: Some("2^-1..2^-3".into()),
            ..Params::default()
        };
        assert_eq!(
            p.eps().unwrap(),
            vec![Exact::new(1, 2), Exact::new(1, 4), Exact::new(1, 8)]
        );
        let p = Params {
            eps: Some("1/2, 0.125".into()),
            ..Params::default()
        };
        assert_eq!(p.eps().unwrap(), vec![Exact::new(1, 2), Exact::new(1, 8)]);
        let p = Params {
            eps: Some("2^-3..2^-1".into()),
            ..Params::default()
        };
        assert!(p.eps().is_err());
    }

    #[test]
    fn sets_on_builtins() {
        let p = Params {
            builtin: Some(Builtin::Lshape),
            ..Params::default()
        };
        let dom = p.domain_required().unwrap();
        assert_eq!(dom.area(), Exact::new(3, 4));
        let top = p.set(&dom, "top").unwrap();
        assert_eq!(top.length(), Exact::from_integer(1));
        assert_eq!(
            p.set(&dom, "edge:0:0:1/4").unwrap().length(),
            Exact::new(1, 4)
        );
        assert!(p.set(&dom, "E").is_err());
        let comb = Params {
            builtin: Some(Builtin::Comb),
            kmax: Some(2),
            k: Some(2),
            ..Params::default()
        };
        let dom = comb.domain_required().unwrap();
        assert_eq!(comb.set(&dom, "F'").unwrap().length(), Exact::new(1, 8));
    }

    #[test]
    fn coefficients() {
        let p = Params {
            qd: Some("1, 0.5-2i".into()),
            ..Params::default()
        };
        assert_eq!(p.qd().unwrap()[1], Complex64::new(0.5, -2.0));
    }
}

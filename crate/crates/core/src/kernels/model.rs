use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    counterexample_kernel, dense_clique_kernel, dirac_kernel, gam_kernel, mslr_kernel, ngca_kernel,
    si_kernel, slab_kernel, GroupSpec, Kernel, LinkSpec, MuSpec, TableKernel,
};
use crate::error::{arg, Error, Result};
use crate::numerics::DEFAULT_MAX_DEGREE;
use crate::overlap_laws::{make_law, Atom, LawSpec, OverlapLaw, Statistic};

fn default_degree() -> usize {
    DEFAULT_MAX_DEGREE
}

fn one() -> u64 {
    1
}

/// Serializable kernel parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kernel", rename_all = "snake_case")]
pub enum KernelSpec {
    Gam {
        lambda: f64,
    },
    Mslr {
        k: u64,
        sigma2: f64,
        #[serde(default = "one")]
        m: u64,
    },
    Ngca {
        mu: MuSpec,
        #[serde(default = "default_degree")]
        max_degree: usize,
    },
    Si {
        link: LinkSpec,
        #[serde(default = "default_degree")]
        max_degree: usize,
    },
    Slab {
        alpha: f64,
        #[serde(default = "default_degree")]
        max_degree: usize,
    },
    Counterexample {
        n: u64,
        r: f64,
        alpha_c: f64,
        #[serde(default = "one")]
        m: u64,
    },
    DenseClique {
        n: u64,
        p: f64,
    },
    Dirac {
        n: u64,
    },
    Table {
        entries: Vec<(Statistic, f64)>,
    },
}

impl KernelSpec {
    pub fn build(&self) -> Result<Arc<dyn Kernel>> {
        Ok(match self {
            KernelSpec::Gam { lambda } => Arc::new(gam_kernel(*lambda)?),
            KernelSpec::Mslr { k, sigma2, m } => Arc::new(mslr_kernel(*k, *sigma2, *m)?),
            KernelSpec::Ngca { mu, max_degree } => Arc::new(ngca_kernel(mu.clone(), *max_degree)?),
            KernelSpec::Si { link, max_degree } => Arc::new(si_kernel(link.clone(), *max_degree)?),
            KernelSpec::Slab { alpha, max_degree } => Arc::new(slab_kernel(*alpha, *max_degree)?),
            KernelSpec::Counterexample { n, r, alpha_c, m } => {
                Arc::new(counterexample_kernel(*n, *r, *alpha_c, *m)?)
            }
            KernelSpec::DenseClique { n, p } => Arc::new(dense_clique_kernel(*n, *p)?),
            KernelSpec::Dirac { n } => Arc::new(dirac_kernel(*n)?),
            KernelSpec::Table { entries } => Arc::new(TableKernel::new(entries.clone())?),
        })
    }
}

/// Model as read from a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub name: String,
    #[serde(flatten)]
    pub kernel: KernelSpec,
    pub law: LawSpec,
    #[serde(default)]
    pub group: GroupSpec,
}

impl ModelDescriptor {
    pub fn build(&self) -> Result<ModelSpec> {
        let kernel = self.kernel.build()?;
        let law = Arc::new(make_law(&self.law)?);
        ModelSpec::new(self.name.clone(), kernel, law, self.group, Some(self.clone()))
    }
}

/// One atom of a hand-built model: statistic value, probability, kernel value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticAtom {
    pub stat: f64,
    pub prob: f64,
    pub kernel: f64,
}

/// A planted-versus-null task: kernel, overlap law and group.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub name: String,
    pub kernel: Arc<dyn Kernel>,
    pub law: Arc<OverlapLaw>,
    pub group: GroupSpec,
    pub descriptor: Option<ModelDescriptor>,
}

impl ModelSpec {
    /// Checks that the kernel reads the law's statistic and that the group
    /// preserves the law.
    pub fn new(
        name: String,
        kernel: Arc<dyn Kernel>,
        law: Arc<OverlapLaw>,
        group: GroupSpec,
        descriptor: Option<ModelDescriptor>,
    ) -> Result<Self> {
        match law.atoms() {
            Some(atoms) => {
                for a in atoms.iter().filter(|a| a.prob > 0.0) {
                    for s in group.orbit(a.stat)? {
                        kernel.eval(s).map_err(|e| {
                            Error::Argument(format!("kernel {} cannot read statistic {s}: {e}", kernel.name()))
                        })?;
                    }
                }
            }
            None => {
                kernel.eval(Statistic::Scalar(0.0))?;
            }
        }
        if !group.preserves(&law) {
            return Err(arg(format!("group {group:?} does not preserve the law of {name}")));
        }
        Ok(ModelSpec {
            name,
            kernel,
            law,
            group,
            descriptor,
        })
    }

    /// Discrete model with a tabulated kernel.
    pub fn synthetic(name: &str, atoms: &[SyntheticAtom], group: GroupSpec) -> Result<Self> {
        let law_atoms: Vec<Atom> = atoms
            .iter()
            .map(|a| Atom {
                stat: Statistic::Scalar(a.stat),
                prob: a.prob,
            })
            .collect();
        let entries: Vec<(Statistic, f64)> = atoms.iter().map(|a| (Statistic::Scalar(a.stat), a.kernel)).collect();
        ModelDescriptor {
            name: name.to_string(),
            kernel: KernelSpec::Table { entries },
            law: LawSpec::Custom { atoms: law_atoms },
            group,
        }
        .build()
    }
}

/// Parameters of the built-in dense planted clique instance.
pub fn dense_clique_parameters(n: u64) -> (f64, u64) {
    let nf = n as f64;
    (1.0 - nf.powf(-0.25), nf.cbrt().round() as u64)
}

/// The desk-scale instance of every model family.
pub fn builtin_models() -> Vec<ModelDescriptor> {
    let (p, k) = dense_clique_parameters(10_000);
    vec![
        ModelDescriptor {
            name: "gam".into(),
            kernel: KernelSpec::Gam { lambda: 1.0 },
            law: LawSpec::Sphere { n: 50 },
            group: GroupSpec::SignFlip,
        },
        ModelDescriptor {
            name: "mslr".into(),
            kernel: KernelSpec::Mslr { k: 4, sigma2: 1.0, m: 1 },
            law: LawSpec::Hypergeometric { n: 40, k: 4 },
            group: GroupSpec::Trivial,
        },
        ModelDescriptor {
            name: "ngca".into(),
            kernel: KernelSpec::Ngca {
                mu: MuSpec::Gaussian { mean: 0.0, var: 0.5 },
                max_degree: DEFAULT_MAX_DEGREE,
            },
            law: LawSpec::Sphere { n: 50 },
            group: GroupSpec::SignFlip,
        },
        ModelDescriptor {
            name: "si".into(),
            kernel: KernelSpec::Si {
                link: LinkSpec::Sign,
                max_degree: DEFAULT_MAX_DEGREE,
            },
            law: LawSpec::Sphere { n: 50 },
            group: GroupSpec::SignFlip,
        },
        ModelDescriptor {
            name: "slab".into(),
            kernel: KernelSpec::Slab {
                alpha: 0.1,
                max_degree: DEFAULT_MAX_DEGREE,
            },
            law: LawSpec::RademacherMean { n: 100 },
            group: GroupSpec::Trivial,
        },
        ModelDescriptor {
            name: "counterexample".into(),
            kernel: KernelSpec::Counterexample {
                n: 8,
                r: 0.3,
                alpha_c: 0.2,
                m: 1,
            },
            law: LawSpec::PairCounts { n: 8, rho: 0.5 },
            group: GroupSpec::Trivial,
        },
        ModelDescriptor {
            name: "dense-clique".into(),
            kernel: KernelSpec::DenseClique { n: 10_000, p },
            law: LawSpec::Hypergeometric { n: 10_000, k },
            group: GroupSpec::Trivial,
        },
        ModelDescriptor {
            name: "dirac".into(),
            kernel: KernelSpec::Dirac { n: 20 },
            law: LawSpec::Diagonal { n: 20 },
            group: GroupSpec::Trivial,
        },
    ]
}

/// Looks up a built-in model by name.
pub fn builtin(name: &str) -> Result<ModelDescriptor> {
    builtin_models()
        .into_iter()
        .find(|m| m.name == name)
        .ok_or_else(|| {
            let names: Vec<String> = builtin_models().into_iter().map(|m| m.name).collect();
            arg(format!("unknown model '{name}'; built-ins are {}", names.join(", ")))
        })
}

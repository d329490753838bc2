use std::fmt;
use std::str::FromStr;

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Estimator identity together with its tuning parameters.
///
/// Objectives use the `(1/n)||y - X beta||^2` scaling:
///
/// * `Lasso`: `(1/n) SSE + lambda ||beta||_1`
/// * `ENet`: `(1/n) SSE + lambda2 ||beta||_2^2 + lambda1 ||beta||_1` (naive form)
/// * `Ridge`: `(C + k I)^{-1} X'y`, `C = X'X`
/// * `Liu`, `LLasso`, `GenLLasso`: `(C + I)^{-1}(C + D)` applied to the OLS or
///   LASSO solution, with `D = d I` or `diag(d)`.
#[derive(Clone, Debug, PartialEq)]
pub enum PenaltySpec<T> {
    Ols,
    Ridge { k: T },
    Liu { d: T },
    Lasso { lambda: T },
    ENet { lambda1: T, lambda2: T },
    LLasso { lambda: T, d: T },
    GenLLasso { lambda: T, d: Array1<T> },
}

fn nonneg<T: Scalar>(name: &'static str, v: T) -> Result<()> {
    if v >= T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::parameter(name, v.as_f64(), "[0, inf)"))
    }
}

fn unit<T: Scalar>(name: &'static str, v: T) -> Result<()> {
    if v >= T::zero() && v <= T::one() {
        Ok(())
    } else {
        Err(Error::parameter(name, v.as_f64(), "[0, 1]"))
    }
}

impl<T: Scalar> PenaltySpec<T> {
    pub fn ridge(k: T) -> Result<Self> {
        Self::Ridge { k }.validated()
    }

    pub fn liu(d: T) -> Result<Self> {
        Self::Liu { d }.validated()
    }

    pub fn lasso(lambda: T) -> Result<Self> {
        Self::Lasso { lambda }.validated()
    }

    pub fn enet(lambda1: T, lambda2: T) -> Result<Self> {
        Self::ENet { lambda1, lambda2 }.validated()
    }

    pub fn llasso(lambda: T, d: T) -> Result<Self> {
        Self::LLasso { lambda, d }.validated()
    }

    pub fn gen_llasso(lambda: T, d: Array1<T>) -> Result<Self> {
        Self::GenLLasso { lambda, d }.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PenaltySpec::Ols => Ok(()),
            PenaltySpec::Ridge { k } => nonneg("k", *k),
            PenaltySpec::Liu { d } => unit("d", *d),
            PenaltySpec::Lasso { lambda } => nonneg("lambda", *lambda),
            PenaltySpec::ENet { lambda1, lambda2 } => {
                nonneg("lambda1", *lambda1)?;
                nonneg("lambda2", *lambda2)
            }
            PenaltySpec::LLasso { lambda, d } => {
                nonneg("lambda", *lambda)?;
                unit("d", *d)
            }
            PenaltySpec::GenLLasso { lambda, d } => {
                nonneg("lambda", *lambda)?;
                d.iter().try_for_each(|&v| unit("D_j", v))
            }
        }
    }

    pub fn kind(&self) -> EstimatorKind {
        match self {
            PenaltySpec::Ols => EstimatorKind::Ols,
            PenaltySpec::Ridge { .. } => EstimatorKind::Ridge,
            PenaltySpec::Liu { .. } => EstimatorKind::Liu,
            PenaltySpec::Lasso { .. } => EstimatorKind::Lasso,
            PenaltySpec::ENet { .. } => EstimatorKind::ENet,
            PenaltySpec::LLasso { .. } => EstimatorKind::LLasso,
            PenaltySpec::GenLLasso { .. } => EstimatorKind::GenLLasso,
        }
    }

    /// Scalar parameters in a fixed order, for reporting.
    pub fn params(&self) -> Vec<(&'static str, T)> {
        match self {
            PenaltySpec::Ols => vec![],
            PenaltySpec::Ridge { k } => vec![("k", *k)],
            PenaltySpec::Liu { d } => vec![("d", *d)],
            PenaltySpec::Lasso { lambda } => vec![("lambda", *lambda)],
            PenaltySpec::ENet { lambda1, lambda2 } => vec![("lambda1", *lambda1), ("lambda2", *lambda2)],
            PenaltySpec::LLasso { lambda, d } => vec![("lambda", *lambda), ("d", *d)],
            PenaltySpec::GenLLasso { lambda, .. } => vec![("lambda", *lambda)],
        }
    }
}

impl<T: Scalar> fmt::Display for PenaltySpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind())?;
        let params = self.params();
        if !params.is_empty() {
            let inner: Vec<String> = params.iter().map(|(n, v)| format!("{n}={v}")).collect();
            write!(f, "({})", inner.join(", "))?;
        }
        Ok(())
    }
}

/// Estimator family, without parameter values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    Ols,
    Ridge,
    Liu,
    Lasso,
    LLasso,
    ENet,
    GenLLasso,
}

impl EstimatorKind {
    /// The six estimators compared in the benchmark tables, in table order.
    pub const BENCHMARK: [EstimatorKind; 6] = [
        EstimatorKind::Ols,
        EstimatorKind::Ridge,
        EstimatorKind::Liu,
        EstimatorKind::Lasso,
        EstimatorKind::LLasso,
        EstimatorKind::ENet,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EstimatorKind::Ols => "OLS",
            EstimatorKind::Ridge => "Ridge",
            EstimatorKind::Liu => "Liu",
            EstimatorKind::Lasso => "LASSO",
            EstimatorKind::LLasso => "LLASSO",
            EstimatorKind::ENet => "E-net",
            EstimatorKind::GenLLasso => "GenLLASSO",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EstimatorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "ols" => Ok(EstimatorKind::Ols),
            "ridge" => Ok(EstimatorKind::Ridge),
            "liu" => Ok(EstimatorKind::Liu),
            "lasso" => Ok(EstimatorKind::Lasso),
            "llasso" => Ok(EstimatorKind::LLasso),
            "enet" | "elasticnet" => Ok(EstimatorKind::ENet),
            "genllasso" => Ok(EstimatorKind::GenLLasso),
            other => Err(format!("unknown estimator `{other}`")),
        }
    }
}

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{MwlError, Result};
use crate::fields::{GridDomain, MatrixField, VectorField};
use crate::linalg::C64;

pub type ApplyFn = Arc<dyn Fn(&VectorField) -> Result<VectorField> + Send + Sync>;

/// A map on vector fields. `adjoint` is present when the map is linear and its adjoint is known.
#[derive(Clone)]
pub struct OperatorHandle {
    pub label: String,
    pub linear: bool,
    apply: ApplyFn,
    adjoint: Option<ApplyFn>,
    multiplier: Option<MatrixField>,
}

impl fmt::Debug for OperatorHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorHandle")
            .field("label", &self.label)
            .field("linear", &self.linear)
            .field("has_adjoint", &self.adjoint.is_some())
            .finish()
    }
}

impl OperatorHandle {
    /// Linear operator with known adjoint.
    pub fn linear(
        label: impl Into<String>,
        apply: impl Fn(&VectorField) -> Result<VectorField> + Send + Sync + 'static,
        adjoint: impl Fn(&VectorField) -> Result<VectorField> + Send + Sync + 'static,
    ) -> Self {
        OperatorHandle {
            label: label.into(),
            linear: true,
            apply: Arc::new(apply),
            adjoint: Some(Arc::new(adjoint)),
            multiplier: None,
        }
    }

    /// Possibly nonlinear map; no adjoint.
    pub fn map(
        label: impl Into<String>,
        apply: impl Fn(&VectorField) -> Result<VectorField> + Send + Sync + 'static,
    ) -> Self {
        OperatorHandle {
            label: label.into(),
            linear: false,
            apply: Arc::new(apply),
            adjoint: None,
            multiplier: None,
        }
    }

    pub fn identity() -> Self {
        Self::linear("id", |f| Ok(f.clone()), |f| Ok(f.clone()))
    }

    pub fn apply(&self, f: &VectorField) -> Result<VectorField> {
        (self.apply)(f)
    }

    pub fn has_adjoint(&self) -> bool {
        self.adjoint.is_some()
    }

    pub fn apply_adjoint(&self, f: &VectorField) -> Result<VectorField> {
        match &self.adjoint {
            Some(a) => a(f),
            None => Err(MwlError::Unsupported(format!(
                "operator {} has no adjoint",
                self.label
            ))),
        }
    }

    pub fn adjoint(&self) -> Result<OperatorHandle> {
        let adj = self.adjoint.clone().ok_or_else(|| {
            MwlError::Unsupported(format!("operator {} has no adjoint", self.label))
        })?;
        Ok(OperatorHandle {
            label: format!("{}*", self.label),
            linear: true,
            apply: adj,
            adjoint: Some(self.apply.clone()),
            multiplier: self.multiplier.as_ref().map(|m| m.adjoint()),
        })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &OperatorHandle) -> OperatorHandle {
        let (a, b) = (self.apply.clone(), other.apply.clone());
        let adjoint = match (&self.adjoint, &other.adjoint) {
            (Some(sa), Some(oa)) => {
                let (sa, oa) = (sa.clone(), oa.clone());
                Some(Arc::new(move |f: &VectorField| oa(&sa(f)?)) as ApplyFn)
            }
            _ => None,
        };
        OperatorHandle {
            label: format!("{}.{}", self.label, other.label),
            linear: self.linear && other.linear,
            apply: Arc::new(move |f| a(&b(f)?)),
            adjoint,
            multiplier: None,
        }
    }

    /// `self + c other`.
    pub fn combine(&self, c: C64, other: &OperatorHandle) -> OperatorHandle {
        let (a, b) = (self.apply.clone(), other.apply.clone());
        let adjoint = match (&self.adjoint, &other.adjoint) {
            (Some(sa), Some(oa)) => {
                let (sa, oa) = (sa.clone(), oa.clone());
                let cc = c.conj();
                Some(Arc::new(move |f: &VectorField| Ok(sa(f)?.axpy(cc, &oa(f)?))) as ApplyFn)
            }
            _ => None,
        };
        OperatorHandle {
            label: format!("({}+{}{})", self.label, c, other.label),
            linear: self.linear && other.linear,
            apply: Arc::new(move |f| Ok(a(f)?.axpy(c, &b(f)?))),
            adjoint,
            multiplier: None,
        }
    }

    /// The matrix field when this is a pointwise multiplication.
    pub fn multiplier(&self) -> Option<&MatrixField> {
        self.multiplier.as_ref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Largest relative deviation from additivity and complex homogeneity over random probes.
    pub fn linearity_defect(
        &self,
        domain: GridDomain,
        n: usize,
        probes: usize,
        seed: u64,
    ) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..probes {
            let f = VectorField::random(&mut rng, domain, n);
            let g = VectorField::random(&mut rng, domain, n);
            let c = C64::new(0.7, -1.3);
            let (tf, tg) = (self.apply(&f)?, self.apply(&g)?);
            let sum = self.apply(&f.add(&g))?;
            let scaled = self.apply(&f.scale(c))?;
            let size = tf.l2_norm() + tg.l2_norm() + f64::MIN_POSITIVE;
            worst = worst
                .max(sum.sub(&tf.add(&tg)).l2_norm() / size)
                .max(scaled.sub(&tf.scale(c)).l2_norm() / (c.norm() * size));
        }
        Ok(worst)
    }
}

/// Linearity tolerance for registration.
pub const LINEARITY_TOLERANCE: f64 = 1e-10;

/// Operators addressable by label. Linear operators are spot-checked on registration.
#[derive(Debug, Default, Clone)]
pub struct OperatorRegistry {
    entries: Vec<OperatorHandle>,
}

impl OperatorRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(
        &mut self,
        op: OperatorHandle,
        domain: GridDomain,
        n: usize,
        seed: u64,
    ) -> Result<()> {
        if self.get(&op.label).is_some() {
            return Err(MwlError::InvalidParameter(format!(
                "operator {} already registered",
                op.label
            )));
        }
        if op.linear {
            let defect = op.linearity_defect(domain, n, 3, seed)?;
            if !(defect <= LINEARITY_TOLERANCE) {
                return Err(MwlError::InvalidParameter(format!(
                    "operator {} asserted linear but deviates by {defect:e}",
                    op.label
                )));
            }
        }
        self.entries.push(op);
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<&OperatorHandle> {
        self.entries.iter().find(|o| o.label == label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|o| o.label.as_str())
    }
}

/// `f -> B f` pointwise.
pub fn matrix_multiplication_operator(b: &MatrixField) -> OperatorHandle {
    let (m, madj) = (b.clone(), b.adjoint());
    let mut op = OperatorHandle::linear("mul", move |f| m.apply(f), move |f| madj.apply(f));
    op.multiplier = Some(b.clone());
    op
}

/// `{B^k, T}`: `[B, T] = BT - TB` for `k = 1`, then `[B, {B^{k-1}, T}]`.
pub fn iterated_commutator(
    b: &MatrixField,
    t: &OperatorHandle,
    k: usize,
) -> Result<OperatorHandle> {
    if k == 0 {
        return Err(MwlError::InvalidParameter(
            "commutator order starts at 1".into(),
        ));
    }
    let m = matrix_multiplication_operator(b);
    let mut c = t.clone();
    for _ in 0..k {
        c = m.compose(&c).combine(C64::new(-1.0, 0.0), &c.compose(&m));
    }
    Ok(c.with_label(format!("{{B^{k},{}}}", t.label)))
}

/// One derivation map `Omega^{(k)}`.
pub type DerivationMap = Arc<dyn Fn(&VectorField) -> Result<VectorField> + Send + Sync>;

/// All of `C_1(T) f, ..., C_n(T) f` from `C_n = [T, Omega_n] - sum_{k<n} Omega_{n-k} C_k`,
/// where `[T, Omega] f = T Omega f - Omega T f`.
pub fn c_n_sequence(
    t: &OperatorHandle,
    omegas: &[DerivationMap],
    n: usize,
    f: &VectorField,
) -> Result<Vec<VectorField>> {
    if n == 0 {
        return Err(MwlError::InvalidParameter("C_n needs n >= 1".into()));
    }
    if omegas.len() < n {
        return Err(MwlError::MissingOrder(omegas.len() + 1));
    }
    let tf = t.apply(f)?;
    let mut cs: Vec<VectorField> = Vec::with_capacity(n);
    for m in 1..=n {
        let om = &omegas[m - 1];
        let mut c = t.apply(&om(f)?)?.sub(&om(&tf)?);
        for k in 1..m {
            c = c.sub(&omegas[m - k - 1](&cs[k - 1])?);
        }
        cs.push(c);
    }
    Ok(cs)
}

/// `C_n(T)` as an operator; each application recomputes the lower orders for its probe.
pub fn c_n_operator(
    t: &OperatorHandle,
    omegas: Vec<DerivationMap>,
    n: usize,
) -> Result<OperatorHandle> {
    if n == 0 {
        return Err(MwlError::InvalidParameter("C_n needs n >= 1".into()));
    }
    if omegas.len() < n {
        return Err(MwlError::MissingOrder(omegas.len() + 1));
    }
    let t = t.clone();
    let label = format!("C_{n}({})", t.label);
    Ok(OperatorHandle::map(label, move |f| {
        Ok(c_n_sequence(&t, &omegas, n, f)?.pop().expect("n >= 1"))
    }))
}

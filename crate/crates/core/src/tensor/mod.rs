//! Dense complex-matrix kernel with multi-party index structure.
//!
//! A [`MultiPartyOperator`] pairs a matrix with a [`SlotStructure`]: the
//! Hilbert space is an ordered tensor product of slots, and every slot belongs
//! to exactly one party. Parties are numbered `0..m`. A party may own several
//! slots (folded ensembles, multi-qudit examples) and those slots need not be
//! contiguous.

mod eigen;
mod matrix;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen};
pub use matrix::ComplexMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest operator dimension any constructor will materialize.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimCap(pub usize);

impl DimCap {
    pub const DEFAULT: DimCap = DimCap(4096);

    pub fn check(self, dim: usize) -> Result<()> {
        if dim > self.0 {
            Err(Error::DimensionCap { dim, cap: self.0 })
        } else {
            Ok(())
        }
    }

    /// `base^exp`, or a cap error if it exceeds the cap (or overflows).
    pub fn checked_pow(self, base: usize, exp: usize) -> Result<usize> {
        let mut acc: usize = 1;
        for _ in 0..exp {
            acc = acc.checked_mul(base).ok_or(Error::DimensionCap {
                dim: usize::MAX,
                cap: self.0,
            })?;
            self.check(acc)?;
        }
        Ok(acc)
    }
}

impl Default for DimCap {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Ordered tensor factors and the party owning each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotStructure {
    slot_dims: Vec<usize>,
    party_of_slot: Vec<usize>,
    parties: usize,
}

impl SlotStructure {
    pub fn new(slot_dims: Vec<usize>, party_of_slot: Vec<usize>) -> Result<Self> {
        if slot_dims.is_empty() {
            return Err(Error::InvalidSlots("no slots".into()));
        }
        if slot_dims.len() != party_of_slot.len() {
            return Err(Error::InvalidSlots(format!(
                "{} slot dims but {} party assignments",
                slot_dims.len(),
                party_of_slot.len()
            )));
        }
        if slot_dims.contains(&0) {
            return Err(Error::InvalidSlots("slot dimension must be positive".into()));
        }
        let parties = party_of_slot.iter().max().map_or(0, |&p| p + 1);
        if parties > 64 {
            return Err(Error::InvalidSlots("at most 64 parties".into()));
        }
        for p in 0..parties {
            if !party_of_slot.contains(&p) {
                return Err(Error::InvalidSlots(format!("party {p} owns no slot")));
            }
        }
        slot_dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidSlots("dimension overflow".into()))?;
        Ok(Self {
            slot_dims,
            party_of_slot,
            parties,
        })
    }

    /// `m` parties with one slot of dimension `d` each.
    pub fn uniform(d: usize, m: usize) -> Result<Self> {
        Self::new(vec![d; m], (0..m).collect())
    }

    pub fn slot_dims(&self) -> &[usize] {
        &self.slot_dims
    }

    pub fn party_of_slot(&self) -> &[usize] {
        &self.party_of_slot
    }

    pub fn num_parties(&self) -> usize {
        self.parties
    }

    pub fn dim(&self) -> usize {
        self.slot_dims.iter().product()
    }

    /// Slot indices owned by `party`, in slot order.
    pub fn slots_of(&self, party: usize) -> Vec<usize> {
        (0..self.slot_dims.len())
            .filter(|&s| self.party_of_slot[s] == party)
            .collect()
    }

    /// Dimension of one party's local space.
    pub fn party_dim(&self, party: usize) -> usize {
        self.slots_of(party).iter().map(|&s| self.slot_dims[s]).product()
    }

    /// Slots of `self` followed by slots of `other`, party labels kept.
    pub fn concat(&self, other: &SlotStructure) -> Result<Self> {
        let mut dims = self.slot_dims.clone();
        dims.extend_from_slice(&other.slot_dims);
        let mut owners = self.party_of_slot.clone();
        owners.extend_from_slice(&other.party_of_slot);
        Self::new(dims, owners)
    }

    /// Row-major strides of each slot within the full index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.slot_dims.len()];
        for s in (0..self.slot_dims.len().saturating_sub(1)).rev() {
            strides[s] = strides[s + 1] * self.slot_dims[s + 1];
        }
        strides
    }

    /// Digits of a full index, one per slot.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.slot_dims.len()];
        for s in (0..self.slot_dims.len()).rev() {
            out[s] = index % self.slot_dims[s];
            index /= self.slot_dims[s];
        }
        out
    }

    fn side_mask(&self, side: &[usize]) -> Result<u64> {
        let mut mask = 0u64;
        for &p in side {
            if p >= self.parties {
                return Err(Error::NotBipartitionSide(format!(
                    "party {p} out of range for {} parties",
                    self.parties
                )));
            }
            mask |= 1 << p;
        }
        let full = if self.parties == 64 {
            u64::MAX
        } else {
            (1u64 << self.parties) - 1
        };
        if mask == 0 || mask == full {
            return Err(Error::NotBipartitionSide(format!(
                "side {side:?} is empty or covers all {} parties",
                self.parties
            )));
        }
        Ok(mask)
    }
}

/// Matrix on a multi-party Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPartyOperator<T: Real> {
    matrix: ComplexMatrix<T>,
    slots: SlotStructure,
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsdReport<T> {
    pub psd: bool,
    pub min_eigenvalue: T,
    pub tol: T,
}

impl<T: Real> MultiPartyOperator<T> {
    pub fn new(matrix: ComplexMatrix<T>, slots: SlotStructure) -> Result<Self> {
        if matrix.dim() != slots.dim() {
            return Err(Error::DimensionMismatch {
                expected: slots.dim(),
                found: matrix.dim(),
            });
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { matrix, slots })
    }

    pub fn identity(slots: SlotStructure) -> Self {
        Self {
            matrix: ComplexMatrix::identity(slots.dim()),
            slots,
        }
    }

    pub fn zeros(slots: SlotStructure) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(slots.dim()),
            slots,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn slots(&self) -> &SlotStructure {
        &self.slots
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn num_parties(&self) -> usize {
        self.slots.num_parties()
    }

    /// Same slot structure, different matrix.
    pub fn with_matrix(&self, matrix: ComplexMatrix<T>) -> Result<Self> {
        Self::new(matrix, self.slots.clone())
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    pub fn is_hermitian(&self) -> bool {
        self.matrix.is_hermitian()
    }

    /// Kronecker product, slots of `self` first.
    pub fn tensor(&self, other: &Self, cap: DimCap) -> Result<Self> {
        let dim = self.dim().checked_mul(other.dim()).ok_or(Error::DimensionCap {
            dim: usize::MAX,
            cap: cap.0,
        })?;
        cap.check(dim)?;
        Ok(Self {
            matrix: self.matrix.kron(&other.matrix),
            slots: self.slots.concat(&other.slots)?,
        })
    }

    /// Partial transpose over every slot owned by a party in `side`.
    ///
    /// `side` must be a nonempty proper subset of the parties.
    pub fn partial_transpose(&self, side: &[usize]) -> Result<Self> {
        let mask = self.slots.side_mask(side)?;
        let strides = self.slots.strides();
        let moved: Vec<usize> = (0..self.slots.slot_dims.len())
            .filter(|&s| mask & (1 << self.slots.party_of_slot[s]) != 0)
            .collect();
        let n = self.dim();
        // Contribution of the transposed slots to each full index.
        let side_part: Vec<usize> = (0..n)
            .map(|i| {
                let digits = self.slots.digits(i);
                moved.iter().map(|&s| digits[s] * strides[s]).sum()
            })
            .collect();
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                let r2 = r - side_part[r] + side_part[c];
                let c2 = c - side_part[c] + side_part[r];
                out.set(r2, c2, self.matrix.get(r, c));
            }
        }
        Ok(Self {
            matrix: out,
            slots: self.slots.clone(),
        })
    }

    pub fn hermitian_eigen(&self) -> Result<HermitianEigen<T>> {
        hermitian_eigen(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// PSD test. The default tolerance is `1e−10·(1 + max |eigenvalue|)`.
    pub fn is_psd(&self, tol: Option<T>) -> Result<PsdReport<T>> {
        psd_report(&self.eigenvalues()?, tol)
    }
}

/// PSD verdict from an already-computed spectrum.
pub fn psd_report<T: Real>(values: &[T], tol: Option<T>) -> Result<PsdReport<T>> {
    let min = values.iter().copied().fold(T::infinity(), T::min);
    let scale = values.iter().map(|v| v.abs()).fold(T::zero(), T::max);
    let tol = tol.unwrap_or_else(|| T::tol(1e-10) * (T::one() + scale));
    if tol < T::zero() {
        return Err(Error::InvalidArgument("PSD tolerance must be nonnegative".into()));
    }
    Ok(PsdReport {
        psd: min >= -tol,
        min_eigenvalue: min,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::re;

    fn bell() -> MultiPartyOperator<f64> {
        let h = 0.5f64;
        let m = ComplexMatrix::from_fn(4, |r, c| {
            if (r == 0 || r == 3) && (c == 0 || c == 3) {
                re(h)
            } else {
                re(0.0)
            }
        });
        MultiPartyOperator::new(m, SlotStructure::uniform(2, 2).unwrap()).unwrap()
    }

    #[test]
    fn identity_tensor_identity() {
        let i2 = MultiPartyOperator::<f64>::identity(SlotStructure::uniform(2, 1).unwrap());
        let t = i2.tensor(&i2, DimCap::DEFAULT).unwrap();
        assert_eq!(t.matrix(), &ComplexMatrix::identity(4));
        assert_eq!(t.slots().slot_dims(), &[2, 2]);
    }

    #[test]
    fn z_tensor_z_on_11() {
        let z = MultiPartyOperator::new(
            ComplexMatrix::<f64>::diagonal(&[1.0, -1.0]),
            SlotStructure::uniform(2, 1).unwrap(),
        )
        .unwrap();
        let zz = z.tensor(&z, DimCap::DEFAULT).unwrap();
        let v = [re(0.0), re(0.0), re(0.0), re(1.0)];
        assert_eq!(zz.matrix().quadratic_form(&v), re(1.0));
    }

    #[test]
    fn tensor_respects_cap() {
        let big = MultiPartyOperator::<f64>::identity(SlotStructure::uniform(2, 6).unwrap());
        let err = big.tensor(&big, DimCap(1024)).unwrap_err();
        assert!(matches!(err, Error::DimensionCap { dim: 4096, cap: 1024 }));
        assert!(err.to_string().contains("dimension cap"));
    }

    #[test]
    fn identity_invariant_under_partial_transpose() {
        let id = MultiPartyOperator::<f64>::identity(SlotStructure::uniform(3, 2).unwrap());
        assert_eq!(id.partial_transpose(&[0]).unwrap(), id);
    }

    #[test]
    fn rejects_trivial_sides() {
        let b = bell();
        assert!(matches!(b.partial_transpose(&[]), Err(Error::NotBipartitionSide(_))));
        assert!(matches!(
            b.partial_transpose(&[0, 1]),
            Err(Error::NotBipartitionSide(_))
        ));
        assert!(matches!(b.partial_transpose(&[2]), Err(Error::NotBipartitionSide(_))));
    }

    #[test]
    fn psd_examples() {
        let id = MultiPartyOperator::<f64>::identity(SlotStructure::uniform(2, 1).unwrap());
        let rep = id.is_psd(None).unwrap();
        assert!(rep.psd);
        assert_eq!(rep.min_eigenvalue, 1.0);

        let d = MultiPartyOperator::new(
            ComplexMatrix::<f64>::diagonal(&[1.0, -0.5]),
            SlotStructure::uniform(2, 1).unwrap(),
        )
        .unwrap();
        let rep = d.is_psd(None).unwrap();
        assert!(!rep.psd);
        assert_eq!(rep.min_eigenvalue, -0.5);
    }

    #[test]
    fn slot_structure_validation() {
        assert!(SlotStructure::new(vec![2, 2], vec![0, 2]).is_err());
        assert!(SlotStructure::new(vec![2, 0], vec![0, 1]).is_err());
        assert!(SlotStructure::new(vec![2], vec![0, 1]).is_err());
        let s = SlotStructure::new(vec![2, 3, 2], vec![1, 0, 1]).unwrap();
        assert_eq!(s.num_parties(), 2);
        assert_eq!(s.party_dim(1), 4);
        assert_eq!(s.strides(), vec![6, 2, 1]);
        assert_eq!(s.digits(11), vec![1, 2, 1]);
    }

    #[test]
    fn operator_dimension_checked() {
        let err = MultiPartyOperator::new(ComplexMatrix::<f64>::identity(3), SlotStructure::uniform(2, 2).unwrap());
        assert!(matches!(err, Err(Error::DimensionMismatch { expected: 4, found: 3 })));
    }
}

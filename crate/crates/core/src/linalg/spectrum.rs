use num_complex::Complex;

use super::eig::HermitianEigen;
use crate::scalar::Real;

/// A group of numerically equal eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster<T> {
    /// Mean of the member eigenvalues.
    pub value: T,
    pub multiplicity: usize,
    /// Orthonormal eigenvectors spanning the cluster; empty when clustering
    /// was done on bare eigenvalues.
    pub basis: Vec<Vec<Complex<T>>>,
}

impl<T> Cluster<T> {
    /// Exponent of the largest power of two dividing the multiplicity.
    pub fn two_adic_valuation(&self) -> u32 {
        self.multiplicity.trailing_zeros()
    }
}

/// Eigenvalues grouped by degeneracy, in descending order of value.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumClusters<T> {
    pub clusters: Vec<Cluster<T>>,
    pub eps: T,
}

impl<T: Real> SpectrumClusters<T> {
    /// Clusters an eigendecomposition and attaches each cluster's eigenvectors.
    pub fn from_eigen(eig: &HermitianEigen<T>, eps: T) -> Self {
        let mut out = cluster_spectrum(&eig.values, eps);
        let mut k = 0;
        for c in &mut out.clusters {
            c.basis = (k..k + c.multiplicity).map(|i| eig.vector(i)).collect();
            k += c.multiplicity;
        }
        out
    }

    pub fn dimension(&self) -> usize {
        self.clusters.iter().map(|c| c.multiplicity).sum()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.multiplicity).collect()
    }

    /// Sum of `value · multiplicity`; equals the trace of the clustered matrix.
    pub fn weighted_sum(&self) -> T {
        self.clusters
            .iter()
            .map(|c| c.value * T::from_usize(c.multiplicity).unwrap_or_else(T::zero))
            .sum()
    }

    /// All eigenvectors in cluster order, which is the canonical order used
    /// when building local unitaries.
    pub fn ordered_basis(&self) -> impl Iterator<Item = &Vec<Complex<T>>> {
        self.clusters.iter().flat_map(|c| c.basis.iter())
    }
}

/// Greedy clustering of descending eigenvalues: a value joins the current
/// cluster when it lies within `eps` of that cluster's first (largest) member.
pub fn cluster_spectrum<T: Real>(eigenvalues: &[T], eps: T) -> SpectrumClusters<T> {
    let mut clusters: Vec<Cluster<T>> = Vec::new();
    let mut head = T::zero();
    let mut sum = T::zero();
    for &v in eigenvalues {
        match clusters.last_mut() {
            Some(c) if (head - v).abs() <= eps => {
                c.multiplicity += 1;
                sum += v;
                c.value = sum / T::from_usize(c.multiplicity).unwrap_or_else(T::one);
            }
            _ => {
                head = v;
                sum = v;
                clusters.push(Cluster {
                    value: v,
                    multiplicity: 1,
                    basis: Vec::new(),
                });
            }
        }
    }
    SpectrumClusters { clusters, eps }
}

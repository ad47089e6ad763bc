//! Correlation screening, residualization, rotated PCA, loading-based
//! variable selection, and group tests.

pub mod correlation;
pub mod hypothesis;
pub mod linalg;
pub mod matrix;
pub mod pca;
pub mod selection;
pub mod special;

pub use correlation::{pearson, pearson_matrix, pearson_p, residualize, CorrelationMatrix};
pub use hypothesis::{
    anova_oneway, holm, kruskal_wallis, mann_whitney, posthoc_pairwise, welch_t, PValueMethod, PairwiseComparison,
    PosthocMethod, Statistic, TestResult,
};
pub use linalg::{jacobi_eigen, least_squares, Matrix, SymmetricEigen};
pub use matrix::{Labels, MetricMatrix};
pub use pca::{
    first_component, pca_varimax, varimax, varimax_criterion, FirstComponent, PcaModel, PcaOptions, Rotation,
};
pub use selection::{assign_dimensions, consensus_variables, match_components, prune_loadings};

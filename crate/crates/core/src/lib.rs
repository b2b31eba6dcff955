pub mod baselines;
pub mod bench;
pub mod cod;
pub mod dataset;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod iod;
pub mod metrics;
pub mod reference;
pub mod synth;

pub use cod::{
    assign_labels, cod_cluster, ClusteringRun, CodParams, CodState, Init, IterationState,
};
pub use error::{Error, Result};
pub use estimators::{hdp, trimmed_mean, HdpResult, TrimmedMeanResult};
pub use geometry::{
    order_stat, pairwise_distances, quantile_rank, CentroidSet, DistanceMatrix, LabelVector,
    PointSet, OUTLIER,
};
pub use iod::{default_params, iod2, iodk, IodParams, IodResult};

//! Measuring how expressive a line drawing is.
//!
//! A drawing is a set of polylines plus a level-of-division annotation.
//! [`geometry`] extracts its feature points and elementary aspects,
//! [`features`] turns those into a 12-value input vector and a 5-value
//! target vector, and [`expressiveness`] combines them into the three
//! aspects (a), (b) and (c). [`perceptron`] learns the input-to-target map
//! and [`svm`] separates drawings by aspect with a linear classifier.
//! [`synth`] generates seeded test corpora.
//!
//! Everything is generic over the float type; `f64` aliases are exported
//! at the crate root.

pub mod analysis;
pub mod drawing;
pub mod error;
pub mod expressiveness;
pub mod features;
pub mod format;
pub mod geometry;
pub mod perceptron;
pub mod scalar;
pub mod svm;
pub mod synth;

pub use analysis::{analyze, Analysis};
pub use drawing::{
    parse_drawing, serialize_drawing, Annotations, Content, Drawing, Point, Polyline,
};
pub use error::{Error, Result};
pub use expressiveness::{Aspect, AspectValues, ExtremeFlag};
pub use features::{InputVector, TargetVector};
pub use geometry::{ElementaryAspects, FeatureKind, FeaturePoint, GeometryConfig};
pub use perceptron::PerceptronModel;
pub use scalar::Real;
pub use svm::SvmModel;

pub type DrawingF64 = Drawing<f64>;
pub type PointF64 = Point<f64>;
pub type PolylineF64 = Polyline<f64>;
pub type InputVectorF64 = InputVector<f64>;
pub type TargetVectorF64 = TargetVector<f64>;
pub type GeometryConfigF64 = GeometryConfig<f64>;
pub type PerceptronModelF64 = PerceptronModel<f64>;
pub type SvmModelF64 = SvmModel<f64>;

pub type DrawingF32 = Drawing<f32>;
pub type PerceptronModelF32 = PerceptronModel<f32>;

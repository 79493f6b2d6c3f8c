//! One-call pipeline from a drawing to its vectors and hand aspects.

use crate::drawing::Drawing;
use crate::error::Result;
use crate::expressiveness::{hand_aspects, AspectValues};
use crate::features::{
    assemble_input, assemble_target, composition_of_features, InputVector, TargetVector,
};
use crate::geometry::{extract, Extraction, GeometryConfig};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis<T> {
    pub extraction: Extraction<T>,
    pub input: InputVector<T>,
    pub target: TargetVector<T>,
    pub aspects: AspectValues<T>,
}

pub fn analyze<T: Real>(d: &Drawing<T>, cfg: &GeometryConfig<T>) -> Result<Analysis<T>> {
    let extraction = extract(d, cfg)?;
    let ea = extraction.aspects;
    let input = assemble_input(d, &ea, &composition_of_features(&extraction.points));
    let target = assemble_target(&ea, d);
    let aspects = hand_aspects(&ea, d.ldiv())?;
    Ok(Analysis {
        extraction,
        input,
        target,
        aspects,
    })
}

//! Everything the engine computes at one point of a construction chart.

use crate::apapr::{
    f_symmetry_residuals, lee_forms, ApaprManifold3D, FSymmetryResiduals, LeeForms,
    StructureValidation,
};
use crate::classify::{decompose, ClassificationReport};
use crate::expr::ChartPoint;
use crate::riemann::{curvature, curvature_in_frame, sectional, CurvaturePack};
use crate::tensor::{FrameData, Orientation, TensorValue};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct PointEvaluation {
    pub point: [f64; 3],
    pub structure: StructureValidation,
    pub frame: FrameData,
    /// φ-basis components of `F`.
    pub f: TensorValue,
    pub f_symmetry: FSymmetryResiduals,
    pub lee: LeeForms,
    /// Coordinate components.
    pub curvature: CurvaturePack,
    pub riemann_frame: TensorValue,
    pub ricci_frame: TensorValue,
    pub ricci_star_frame: TensorValue,
    pub scalar: f64,
    pub scalar_star: f64,
    pub k01: f64,
    pub k02: f64,
    pub k12: f64,
    pub classification: ClassificationReport,
    /// Signature of `g̃`.
    pub associated_signature: (usize, usize),
}

pub fn evaluate_point(
    m: &ApaprManifold3D,
    p: &ChartPoint<3>,
    orientation: Orientation,
    structure_tolerance: f64,
    class_tolerance: f64,
) -> Result<PointEvaluation> {
    let structure = m.validate_structure_with(p, structure_tolerance)?;
    let fundamental = m.fundamental_f(p, orientation)?;
    let frame = fundamental.frame;
    let f = fundamental.components;
    let lee = lee_forms(&f);
    let classification = decompose(&f, &lee, class_tolerance)?;
    let phi = m.structure_at(p)?.phi;
    let pack = curvature(m.metric(), p, Some(&phi))?;
    // frame quantities come from the frame chart, not from transforming `pack`
    let in_frame = curvature_in_frame(m.metric(), p, &frame, Some(&phi))?;
    let (rho_star, scalar_star) = in_frame.starred()?;
    let unit = |a: usize| -> Vec<f64> { (0..3).map(|i| (i == a) as u8 as f64).collect() };
    let k = |a: usize, b: usize| sectional(&in_frame.riemann, &in_frame.metric, &unit(a), &unit(b));
    Ok(PointEvaluation {
        point: p.coords,
        structure,
        f_symmetry: f_symmetry_residuals(&f),
        lee,
        ricci_star_frame: rho_star.clone(),
        riemann_frame: in_frame.riemann.clone(),
        ricci_frame: in_frame.ricci.clone(),
        scalar: in_frame.scalar,
        scalar_star,
        k01: k(0, 1)?,
        k02: k(0, 2)?,
        k12: k(1, 2)?,
        classification,
        associated_signature: m.associated_metric(p)?.signature,
        curvature: pack,
        frame,
        f,
    })
}

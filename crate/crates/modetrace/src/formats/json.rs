//! Model and evaluation-report JSON documents.

use modetrace_core::{EvalReport, ForestModel};

use crate::error::FormatError;

pub fn model_to_json(model: &ForestModel) -> Result<String, FormatError> {
    let mut s = serde_json::to_string_pretty(model)?;
    s.push('\n');
    Ok(s)
}

pub fn model_from_json(text: &str) -> Result<ForestModel, FormatError> {
    let model: ForestModel = serde_json::from_str(text)?;
    model.validate()?;
    Ok(model)
}

pub fn report_to_json(report: &EvalReport) -> Result<String, FormatError> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn report_from_json(text: &str) -> Result<EvalReport, FormatError> {
    Ok(serde_json::from_str(text)?)
}

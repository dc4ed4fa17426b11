//! Certificates: a spec echo plus the realization that reproduces it.

use entropic_core::realization::Units;
use entropic_core::{realize, Realization};
use serde::{Deserialize, Serialize};

use crate::document::{canonical_json, SpecDocument};
use crate::error::{CliError, Result};

pub const CERTIFICATE_FORMAT: &str = "entropic-realization/1";
pub const BUILDER_VERSION: &str = concat!("entropic ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub certificate: String,
    pub builder_version: String,
    pub spec: SpecDocument,
    pub realization: Realization,
    pub units: Units,
}

impl Certificate {
    /// Validates the document and builds its realization.
    pub fn build(doc: &SpecDocument) -> Result<Self> {
        let spec = doc.to_spec()?;
        let realization = realize(&spec)?.ok_or_else(|| {
            CliError::Usage(format!("family {} has no realization", doc.family()))
        })?;
        Ok(Certificate {
            certificate: CERTIFICATE_FORMAT.to_string(),
            builder_version: BUILDER_VERSION.to_string(),
            // echo the normalized form so rationals read back identically
            spec: SpecDocument::from_spec(&spec),
            units: realization.units(),
            realization,
        })
    }

    pub fn to_text(&self) -> Result<String> {
        canonical_json(self)
    }

    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let cert: Certificate = serde_json::from_str(text).map_err(|e| CliError::Parse {
            path: path.to_string(),
            message: e.to_string(),
        })?;
        if cert.certificate != CERTIFICATE_FORMAT {
            return Err(CliError::Parse {
                path: path.to_string(),
                message: format!("unsupported certificate format {:?}", cert.certificate),
            });
        }
        Ok(cert)
    }
}

/// What `verify` was pointed at.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Spec(SpecDocument),
    Certificate(Box<Certificate>),
}

impl Input {
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Parse {
            path: path.to_string(),
            message: e.to_string(),
        })?;
        if value.get("certificate").is_some() {
            Certificate::parse(text, path).map(|c| Input::Certificate(Box::new(c)))
        } else {
            SpecDocument::parse(text, path).map(Input::Spec)
        }
    }

    pub fn spec(&self) -> &SpecDocument {
        match self {
            Input::Spec(s) => s,
            Input::Certificate(c) => &c.spec,
        }
    }
}

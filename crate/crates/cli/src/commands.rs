//! Subcommand implementations. Each returns the text to emit and an exit code
//! so the binary and the tests share one code path.

use std::path::Path;

use entropic_core::concretize::{
    atom_scale, instantiate_atoms, instantiate_block, instantiate_linear,
};
use entropic_core::generate::{Family, Generator, Shape};
use entropic_core::rational::{display, to_f64};
use entropic_core::setfn::{cond_gain, scmi, smi};
use entropic_core::{realize, GroundSet, Mask, Realization, SetFunction};
use serde::Serialize;

use crate::autoscale::auto_scale;
use crate::certificate::{Certificate, Input};
use crate::document::{canonical_json, SpecDocument};
use crate::error::{CliError, Result, EXIT_PASS};
use crate::verify::{verify, VerifyOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_spec(path: &Path) -> Result<SpecDocument> {
    SpecDocument::parse(&read_file(path)?, &path.display().to_string())
}

pub fn realize_cmd(doc: &SpecDocument) -> Result<Outcome> {
    Ok(Outcome {
        output: Certificate::build(doc)?.to_text()?,
        exit_code: EXIT_PASS,
    })
}

pub fn verify_cmd(input: &Input, opts: &VerifyOptions, format: Format) -> Result<Outcome> {
    let report = verify(input, opts)?;
    let output = match format {
        Format::Json => canonical_json(&report)?,
        Format::Text => report.to_text(),
    };
    Ok(Outcome {
        output,
        exit_code: report.exit_code(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShannonValues {
    pub bits_per_unit: Option<f64>,
    pub mutual_information_bits: f64,
    pub conditional_entropy_bits: f64,
    pub conditional_mutual_information_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimValues {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
    pub smi: String,
    pub cond_gain: String,
    pub scmi: String,
    pub shannon: Option<ShannonValues>,
}

/// Sum over blocks of the Shannon quantities of each block's pmf, each block
/// weighted by its mixture scale over its own bits-per-unit, in function units.
fn shannon_values(
    real: &Realization,
    a: Mask,
    b: Mask,
    c: Mask,
    cap: u128,
) -> Result<ShannonValues> {
    let blocks: Vec<(f64, entropic_core::concretize::JointModel)> = match real {
        Realization::Atoms(s) => vec![(1.0, instantiate_atoms(s, atom_scale(s), cap)?)],
        Realization::Linear(s) => vec![(1.0, instantiate_linear(s, cap)?)],
        Realization::Mixture(m) => m
            .blocks()
            .iter()
            .map(|b| Ok((to_f64(&b.scale), instantiate_block(&b.block, cap)?)))
            .collect::<entropic_core::Result<_>>()?,
    };
    let single = blocks.len() == 1 && blocks[0].0 == 1.0;
    let mut mi = 0.0;
    let mut ce = 0.0;
    let mut cmi = 0.0;
    for (scale, model) in &blocks {
        let h = |m: Mask| model.entropy(m);
        // a lone block reports raw bits; mixtures are normalized to function units
        let w = if single {
            1.0
        } else {
            scale / model.bits_per_unit()
        };
        mi += w * (h(a) + h(b) - h(a | b));
        ce += w * (h(a | b) - h(b));
        cmi += w * (h(a | c) + h(b | c) - h(c) - h(a | b | c));
    }
    Ok(ShannonValues {
        bits_per_unit: single.then(|| blocks[0].1.bits_per_unit()),
        mutual_information_bits: mi,
        conditional_entropy_bits: ce,
        conditional_mutual_information_bits: cmi,
    })
}

pub struct SimRequest<'a> {
    pub a: &'a [usize],
    pub b: &'a [usize],
    pub c: &'a [usize],
    pub concretize: bool,
    pub cap: u128,
}

pub fn sim_cmd(doc: &SpecDocument, req: &SimRequest, format: Format) -> Result<Outcome> {
    let spec = doc.to_spec()?;
    let ground: GroundSet = spec.ground();
    let (a, b, c) = (
        ground.mask_of(req.a)?,
        ground.mask_of(req.b)?,
        ground.mask_of(req.c)?,
    );
    let f = spec.tabulate();
    let (i, g, ic) = (smi(&f, a, b)?, cond_gain(&f, a, b)?, scmi(&f, a, b, c)?);
    let shannon = if req.concretize {
        let real = realize(&spec)?
            .ok_or_else(|| CliError::Usage("explicit tables cannot be concretized".into()))?;
        Some(shannon_values(&real, a, b, c, req.cap)?)
    } else {
        None
    };
    let values = SimValues {
        a: req.a.to_vec(),
        b: req.b.to_vec(),
        c: req.c.to_vec(),
        smi: display(&i),
        cond_gain: display(&g),
        scmi: display(&ic),
        shannon,
    };
    let output = match format {
        Format::Json => canonical_json(&values)?,
        Format::Text => {
            let mut s = format!(
                "I_f(A;B) = {}\nH_f(A|B) = {}\nI_f(A;B|C) = {}\n",
                values.smi, values.cond_gain, values.scmi
            );
            if let Some(sh) = &values.shannon {
                let unit = match sh.bits_per_unit {
                    Some(_) => "bits",
                    None => "units",
                };
                s.push_str(&format!(
                    "I(X_A;X_B) = {:.12} {unit}\nH(X_A|X_B) = {:.12} {unit}\nI(X_A;X_B|X_C) = {:.12} {unit}\n",
                    sh.mutual_information_bits, sh.conditional_entropy_bits, sh.conditional_mutual_information_bits
                ));
                if let Some(d) = sh.bits_per_unit {
                    s.push_str(&format!("bits per unit = {d}\n"));
                }
            }
            s
        }
    };
    Ok(Outcome {
        output,
        exit_code: EXIT_PASS,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct Scaled {
    scale: i128,
    spec: SpecDocument,
}

pub fn auto_scale_cmd(doc: &SpecDocument) -> Result<Outcome> {
    let (scaled, factor) = auto_scale(doc)?;
    Ok(Outcome {
        output: canonical_json(&Scaled {
            scale: factor,
            spec: scaled,
        })?,
        exit_code: EXIT_PASS,
    })
}

pub fn parse_family(name: &str) -> Result<Family> {
    Family::ALL
        .into_iter()
        .find(|f| f.name() == name)
        .ok_or_else(|| {
            let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
            CliError::Usage(format!(
                "unknown family {name:?}; expected one of {}",
                names.join(", ")
            ))
        })
}

pub fn generate_cmd(family: Family, seed: u64, small: bool) -> Result<Outcome> {
    let shape = if small { Shape::SMALL } else { Shape::STANDARD };
    let spec = Generator::new(seed).instance(family, shape);
    Ok(Outcome {
        output: canonical_json(&SpecDocument::from_spec(&spec))?,
        exit_code: EXIT_PASS,
    })
}

/// Parses `"0,2,3"` into element indices; an empty string is the empty set.
pub fn parse_elements(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad element index {s:?}")))
        })
        .collect()
}

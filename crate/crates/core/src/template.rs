//! Prompt templates for the eight user-content variants (NC and LP, each
//! zero/few-shot with and without structure), with `{name}` placeholders.
//!
//! The embedded defaults are the canonical wording; a pack can also be
//! loaded from a directory holding one UTF-8 text file per variant
//! (`nc_zero.txt`, `nc_zero_struct.txt`, ...), or exported back out for
//! editing. Substitution is single-pass, so placeholder-looking text
//! inside substituted values is never re-expanded.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("template {variant}: unknown placeholder {{{name}}}")]
    UnknownPlaceholder { variant: String, name: String },
    #[error("template {variant}: missing required placeholder {{{name}}}")]
    MissingPlaceholder { variant: String, name: String },
    #[error("template {variant}: unclosed '{{' at byte {at}")]
    Unclosed { variant: String, at: usize },
    #[error("no value supplied for placeholder {{{0}}}")]
    NoValue(String),
}

const NC_ZERO: &str = "Below I will provide you with target node information.{cot}\n\
Target node content: {target_text}.";

const NC_ZERO_STRUCT: &str = "Below I will provide you with target node information and target \
node neighbor information. You need to use target node neighbor information to help you predict \
the category of target node.{cot}\n\
Target node content: {target_text}.\n\
It has following neighbor {node_noun}s at hop {hop}:{neighbor_block}";

const NC_FEW: &str = "Below I will provide you with target node information and some other \
examples in order. You need to use examples to help you predict the category of target \
node.{cot}\n\
Target node content: {target_text}.\n\
I will give you some other examples to help you predict the category:{example_block}";

const NC_FEW_STRUCT: &str = "Below I will provide you with target node information, target node \
neighbor information and some other examples in order. You need to use target node neighbor \
information and some other examples to help you predict the category of target node.{cot}\n\
Target node content: {target_text}.\n\
It has following neighbor {node_noun}s at hop {hop}:{neighbor_block}\n\
I will give you some other examples to help you predict the category:{example_block}";

const LP_ZERO: &str = "Below I will provide you with target 2 nodes information.{cot}\n\
The 2 target nodes content: {target_text} {target_text_2}";

const LP_ZERO_STRUCT: &str = "Below I will provide you with target 2 nodes information and the \
first node's neighbor information in order. You need to use the first node's neighbor \
information to help you predict the link between the 2 target nodes.{cot}\n\
The 2 target nodes content: {target_text} {target_text_2}\n\
For the first node: It has following neighbor {node_noun}s at hop {hop}:{neighbor_block}";

const LP_FEW: &str = "Below I will provide you with target 2 nodes information and some other \
examples of node pairs and connections in order. You need to use the other examples to help you \
predict the link between the 2 target nodes.{cot}\n\
The 2 target nodes content: {target_text} {target_text_2}.\n\
The following are the some other examples of node pairs and connections:{example_block}";

const LP_FEW_STRUCT: &str = "Below I will provide you with target 2 nodes information, the first \
node's neighbor information and some other examples of node pairs and connections in order. You \
need to use the first node's neighbor information and other examples to help you predict the \
link between the 2 target nodes.{cot}\n\
The 2 target nodes content: {target_text} {target_text_2}.\n\
For the first node: It has following neighbor {node_noun}s at hop {hop}:{neighbor_block}\n\
The following are the some other examples of node pairs and connections:{example_block}";

/// The eight template variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    NcZero,
    NcZeroStruct,
    NcFew,
    NcFewStruct,
    LpZero,
    LpZeroStruct,
    LpFew,
    LpFewStruct,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::NcZero,
        Variant::NcZeroStruct,
        Variant::NcFew,
        Variant::NcFewStruct,
        Variant::LpZero,
        Variant::LpZeroStruct,
        Variant::LpFew,
        Variant::LpFewStruct,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            Variant::NcZero => "nc_zero.txt",
            Variant::NcZeroStruct => "nc_zero_struct.txt",
            Variant::NcFew => "nc_few.txt",
            Variant::NcFewStruct => "nc_few_struct.txt",
            Variant::LpZero => "lp_zero.txt",
            Variant::LpZeroStruct => "lp_zero_struct.txt",
            Variant::LpFew => "lp_few.txt",
            Variant::LpFewStruct => "lp_few_struct.txt",
        }
    }

    fn key(self) -> &'static str {
        match self {
            Variant::NcZero => "nc_zero",
            Variant::NcZeroStruct => "nc_zero_struct",
            Variant::NcFew => "nc_few",
            Variant::NcFewStruct => "nc_few_struct",
            Variant::LpZero => "lp_zero",
            Variant::LpZeroStruct => "lp_zero_struct",
            Variant::LpFew => "lp_few",
            Variant::LpFewStruct => "lp_few_struct",
        }
    }

    /// Placeholders this variant must contain, and may contain nothing else.
    fn placeholders(self) -> &'static [&'static str] {
        match self {
            Variant::NcZero => &["cot", "target_text"],
            Variant::NcZeroStruct => &["cot", "target_text", "node_noun", "hop", "neighbor_block"],
            Variant::NcFew => &["cot", "target_text", "example_block"],
            Variant::NcFewStruct => &[
                "cot",
                "target_text",
                "node_noun",
                "hop",
                "neighbor_block",
                "example_block",
            ],
            Variant::LpZero => &["cot", "target_text", "target_text_2"],
            Variant::LpZeroStruct => &[
                "cot",
                "target_text",
                "target_text_2",
                "node_noun",
                "hop",
                "neighbor_block",
            ],
            Variant::LpFew => &["cot", "target_text", "target_text_2", "example_block"],
            Variant::LpFewStruct => &[
                "cot",
                "target_text",
                "target_text_2",
                "node_noun",
                "hop",
                "neighbor_block",
                "example_block",
            ],
        }
    }
}

/// A full set of the eight templates.
#[derive(Debug, Clone)]
pub struct TemplatePack {
    templates: [String; 8],
}

impl Default for TemplatePack {
    fn default() -> Self {
        Self {
            templates: [
                NC_ZERO.into(),
                NC_ZERO_STRUCT.into(),
                NC_FEW.into(),
                NC_FEW_STRUCT.into(),
                LP_ZERO.into(),
                LP_ZERO_STRUCT.into(),
                LP_FEW.into(),
                LP_FEW_STRUCT.into(),
            ],
        }
    }
}

impl TemplatePack {
    pub fn get(&self, variant: Variant) -> &str {
        &self.templates[Variant::ALL.iter().position(|&v| v == variant).unwrap()]
    }

    /// Load a pack from a directory of per-variant text files. Each file
    /// must carry exactly its variant's placeholder set.
    pub fn load(dir: &Path) -> Result<Self, TemplateError> {
        let mut pack = Self::default();
        for (i, variant) in Variant::ALL.iter().enumerate() {
            let path = dir.join(variant.file_name());
            let text = fs::read_to_string(&path).map_err(|source| TemplateError::Io {
                path: path.display().to_string(),
                source,
            })?;
            pack.templates[i] = text;
        }
        pack.validate()?;
        Ok(pack)
    }

    /// Write the pack out as one file per variant.
    pub fn export(&self, dir: &Path) -> Result<(), TemplateError> {
        fs::create_dir_all(dir).map_err(|source| TemplateError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        for (i, variant) in Variant::ALL.iter().enumerate() {
            let path = dir.join(variant.file_name());
            fs::write(&path, &self.templates[i]).map_err(|source| TemplateError::Io {
                path: path.display().to_string(),
                source,
            })?;
        }
        Ok(())
    }

    /// Check every template's placeholder set against its variant.
    pub fn validate(&self) -> Result<(), TemplateError> {
        for (i, variant) in Variant::ALL.iter().enumerate() {
            let required = variant.placeholders();
            let found = scan_placeholders(&self.templates[i], variant.key())?;
            for name in &found {
                if !required.contains(&name.as_str()) {
                    return Err(TemplateError::UnknownPlaceholder {
                        variant: variant.key().into(),
                        name: name.clone(),
                    });
                }
            }
            for name in required {
                if !found.contains(&name.to_string()) {
                    return Err(TemplateError::MissingPlaceholder {
                        variant: variant.key().into(),
                        name: name.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Substitute placeholders in one pass.
    pub fn fill(&self, variant: Variant, values: &BTreeMap<&str, String>) -> Result<String, TemplateError> {
        let template = self.get(variant);
        let mut out = String::with_capacity(template.len() + 256);
        let mut rest = template;
        while let Some(open) = rest.find('{') {
            out.push_str(&rest[..open]);
            let after = &rest[open + 1..];
            let close = after.find('}').ok_or_else(|| TemplateError::Unclosed {
                variant: variant.key().into(),
                at: template.len() - rest.len() + open,
            })?;
            let name = &after[..close];
            let value = values
                .get(name)
                .ok_or_else(|| TemplateError::NoValue(name.to_string()))?;
            out.push_str(value);
            rest = &after[close + 1..];
        }
        out.push_str(rest);
        Ok(out)
    }
}

fn scan_placeholders(template: &str, variant: &str) -> Result<Vec<String>, TemplateError> {
    let mut names = Vec::new();
    let mut rest = template;
    let mut offset = 0;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        let close = after.find('}').ok_or_else(|| TemplateError::Unclosed {
            variant: variant.into(),
            at: offset + open,
        })?;
        let name = after[..close].to_string();
        if !names.contains(&name) {
            names.push(name);
        }
        offset += open + 1 + close + 1;
        rest = &after[close + 1..];
    }
    Ok(names)
}

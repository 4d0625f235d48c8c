//! Output files: CSV with `#` provenance lines, JSON documents and the run
//! record. Files are collected in memory and written only once a command
//! has finished, so a failing run leaves no partial output behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::fock::FockState;
use crate::serde_ext::fmt_f64;
use crate::{Error, Result, C64};

pub const TOOL: &str = "catfield";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Name of the run record written next to the outputs.
pub const RECORD_FILE: &str = "run.json";

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_sha256: String,
}

impl Provenance {
    pub fn new(command: &str, resolved_config: &impl Serialize) -> Result<Self> {
        let text = serde_json::to_string(resolved_config).map_err(|e| Error::Inconsistent(e.to_string()))?;
        Ok(Self { tool: TOOL, version: VERSION, command: command.to_string(), config_sha256: sha256_hex(text.as_bytes()) })
    }

    fn comment_block(&self) -> String {
        format!(
            "# {} {}\n# command: {}\n# config_sha256: {}\n",
            self.tool, self.version, self.command, self.config_sha256
        )
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Cell of a CSV row.
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_f64(*x),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub name: String,
    pub sha256: String,
}

/// Run record: provenance, resolved configuration and output digests.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord<'a, C: Serialize> {
    pub provenance: &'a Provenance,
    pub config: &'a C,
    pub files: Vec<FileRecord>,
    /// Digest over the names and digests of all output files.
    pub output_sha256: String,
}

pub struct OutputSet {
    prov: Provenance,
    prefix: String,
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn new(prov: Provenance, prefix: &str) -> Self {
        Self { prov, prefix: prefix.to_string(), files: Vec::new() }
    }

    pub fn provenance(&self) -> &Provenance {
        &self.prov
    }

    fn name(&self, base: &str) -> String {
        format!("{}{}", self.prefix, base)
    }

    pub fn csv(&mut self, base: &str, comments: &[String], columns: &[&str], rows: &[Vec<Cell>]) {
        let mut s = self.prov.comment_block();
        for c in comments {
            s.push_str("# ");
            s.push_str(c);
            s.push('\n');
        }
        s.push_str(&columns.join(","));
        s.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        let name = self.name(base);
        self.files.push((name, s.into_bytes()));
    }

    pub fn state(&mut self, base: &str, comments: &[String], psi: &FockState) {
        let rows: Vec<Vec<Cell>> = psi
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(n, c)| vec![Cell::I(n as i64), Cell::F(c.re), Cell::F(c.im)])
            .collect();
        self.csv(base, comments, &["n", "re", "im"], &rows);
    }

    pub fn json(&mut self, base: &str, body: &impl Serialize) -> Result<()> {
        #[derive(Serialize)]
        struct Doc<'a, T: Serialize> {
            provenance: &'a Provenance,
            #[serde(flatten)]
            body: &'a T,
        }
        let mut text = serde_json::to_string_pretty(&Doc { provenance: &self.prov, body })
            .map_err(|e| Error::Inconsistent(e.to_string()))?;
        text.push('\n');
        let name = self.name(base);
        self.files.push((name, text.into_bytes()));
        Ok(())
    }

    pub fn file_names(&self) -> Vec<String> {
        self.files.iter().map(|f| f.0.clone()).collect()
    }

    pub fn contents(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|f| f.0 == name).map(|f| f.1.as_slice())
    }

    /// Write all files and the run record into `dir`.
    pub fn commit<C: Serialize>(self, dir: &Path, config: &C) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut records = Vec::new();
        let mut digest = Sha256::new();
        for (name, bytes) in &self.files {
            let h = sha256_hex(bytes);
            digest.update(name.as_bytes());
            digest.update(b"\0");
            digest.update(h.as_bytes());
            digest.update(b"\n");
            records.push(FileRecord { name: name.clone(), sha256: h });
        }
        let record = RunRecord {
            provenance: &self.prov,
            config,
            files: records,
            output_sha256: hex::encode(digest.finalize()),
        };
        let mut rec = serde_json::to_string_pretty(&record).map_err(|e| Error::Inconsistent(e.to_string()))?;
        rec.push('\n');

        let mut written = Vec::new();
        let record_name = self.name(RECORD_FILE);
        for (name, bytes) in self.files.iter().map(|(n, b)| (n.as_str(), b.as_slice())).chain([(record_name.as_str(), rec.as_bytes())]) {
            let path = dir.join(name);
            let tmp = dir.join(format!(".{name}.tmp"));
            {
                let mut f = fs::File::create(&tmp)?;
                f.write_all(bytes)?;
                f.sync_all()?;
            }
            fs::rename(&tmp, &path)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Read a state file: `#` comments, an optional `n,re,im` header, then one
/// `n,re,im` line per amplitude with consecutive `n` from 0.
pub fn read_state(path: &Path, tail_tol: f64) -> Result<FockState> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read state {}: {e}", path.display())))?;
    let bad = |line: usize, m: &str| Error::Config(format!("{}:{line}: {m}", path.display()));
    let mut amps = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let l = line.trim();
        if l.is_empty() || l.starts_with('#') || l == "n,re,im" {
            continue;
        }
        let parts: Vec<&str> = l.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad(k + 1, "expected n,re,im"));
        }
        let n: usize = parts[0].parse().map_err(|_| bad(k + 1, "bad index"))?;
        if n != amps.len() {
            return Err(bad(k + 1, "indices must be consecutive from 0"));
        }
        let re: f64 = parts[1].parse().map_err(|_| bad(k + 1, "bad real part"))?;
        let im: f64 = parts[2].parse().map_err(|_| bad(k + 1, "bad imaginary part"))?;
        if !(re.is_finite() && im.is_finite()) {
            return Err(bad(k + 1, "non-finite amplitude"));
        }
        amps.push(C64::new(re, im));
    }
    if amps.len() < 2 {
        return Err(Error::Config(format!("{}: state needs at least two amplitudes", path.display())));
    }
    let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::Config(format!("{}: zero state", path.display())));
    }
    let amps: Vec<C64> = amps.into_iter().map(|c| c / norm).collect();
    FockState::from_amplitudes_unchecked(amps).map(|s| s.with_tail_tol(tail_tol))
}

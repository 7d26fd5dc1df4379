//! Dataset acquisition from the checked-in manifest.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use flate2::read::GzDecoder;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub name: String,
    pub directed: bool,
    pub url: String,
    /// Lower-case hex SHA-256 of the archive, when pinned.
    pub sha256: Option<String>,
}

impl ManifestEntry {
    /// File name of the decompressed edge list.
    pub fn file_name(&self) -> String {
        let base = self.url.rsplit('/').next().unwrap_or(&self.name);
        base.strip_suffix(".gz").unwrap_or(base).to_string()
    }
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>> {
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [name, directed, url, hash] = fields[..] else {
            bail!("manifest line {}: expected `name directed url sha256`", idx + 1);
        };
        let directed = match directed {
            "true" => true,
            "false" => false,
            other => bail!("manifest line {}: directed must be true or false, got {other:?}", idx + 1),
        };
        let sha256 = match hash {
            "-" => None,
            h if h.len() == 64 && h.bytes().all(|b| b.is_ascii_hexdigit()) => Some(h.to_ascii_lowercase()),
            h => bail!("manifest line {}: bad sha256 {h:?}", idx + 1),
        };
        entries.push(ManifestEntry {
            name: name.to_string(),
            directed,
            url: url.to_string(),
            sha256,
        });
    }
    Ok(entries)
}

pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
    parse_manifest(&text)
}

fn download(url: &str) -> Result<Vec<u8>> {
    let mut body = ureq::get(url).call().with_context(|| format!("GET {url}"))?.into_body();
    let mut bytes = Vec::new();
    body.as_reader()
        .read_to_end(&mut bytes)
        .with_context(|| format!("reading body of {url}"))?;
    Ok(bytes)
}

/// Checks the archive digest against the manifest and writes the decompressed edge list
/// into `dest`. Returns the written path and the archive digest.
pub fn install(entry: &ManifestEntry, archive: &[u8], dest: &Path) -> Result<(PathBuf, String)> {
    let digest = hex::encode(Sha256::digest(archive));
    if let Some(expected) = &entry.sha256 {
        if &digest != expected {
            bail!("{}: sha256 mismatch, manifest {expected}, got {digest}", entry.name);
        }
    } else {
        log::warn!("{}: no pinned digest; archive sha256 is {digest}", entry.name);
    }
    fs::create_dir_all(dest).with_context(|| format!("creating {}", dest.display()))?;
    let out_path = dest.join(entry.file_name());
    let tmp_path = out_path.with_extension("part");
    let result = (|| -> Result<()> {
        let mut out = File::create(&tmp_path)?;
        if archive.starts_with(&[0x1f, 0x8b]) {
            std::io::copy(&mut GzDecoder::new(archive), &mut out)?;
        } else {
            out.write_all(archive)?;
        }
        out.flush()?;
        fs::rename(&tmp_path, &out_path)?;
        Ok(())
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp_path);
        return Err(e.context(format!("writing {}", out_path.display())));
    }
    Ok((out_path, digest))
}

/// Fetches `entry` from its URL, or from `local` when given (offline mode).
pub fn fetch(entry: &ManifestEntry, dest: &Path, local: Option<&Path>) -> Result<(PathBuf, String)> {
    let archive = match local {
        Some(path) => fs::read(path).with_context(|| format!("reading {}", path.display()))?,
        None => {
            log::info!("downloading {}", entry.url);
            download(&entry.url)?
        }
    };
    install(entry, &archive, dest)
}

/// Number of data lines in a decompressed edge list, for a quick sanity report.
pub fn count_data_lines(path: &Path) -> Result<usize> {
    let file = File::open(path)?;
    let mut count = 0;
    for line in BufReader::new(file).lines() {
        let line = line?;
        if !line.trim().is_empty() && !line.trim_start().starts_with('#') {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use flate2::write::GzEncoder;
    use flate2::Compression;

    #[test]
    fn manifest_parsing() {
        let m = parse_manifest("# x\nfb false https://h/facebook_combined.txt.gz -\n").unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].file_name(), "facebook_combined.txt");
        assert!(m[0].sha256.is_none());
        assert!(parse_manifest("fb maybe https://h/x.gz -\n").is_err());
        assert!(parse_manifest("fb false https://h/x.gz abc\n").is_err());
    }

    #[test]
    fn install_checks_digest_and_decompresses() {
        let mut gz = GzEncoder::new(Vec::new(), Compression::default());
        gz.write_all(b"0 1\n1 2\n").unwrap();
        let archive = gz.finish().unwrap();
        let digest = hex::encode(Sha256::digest(&archive));
        let dir = tempfile::tempdir().unwrap();
        let mut entry = ManifestEntry {
            name: "toy".into(),
            directed: false,
            url: "https://example.invalid/toy.txt.gz".into(),
            sha256: Some(digest.clone()),
        };
        let (path, got) = install(&entry, &archive, dir.path()).unwrap();
        assert_eq!(got, digest);
        assert_eq!(fs::read_to_string(&path).unwrap(), "0 1\n1 2\n");
        assert_eq!(count_data_lines(&path).unwrap(), 2);

        entry.sha256 = Some("0".repeat(64));
        fs::remove_file(&path).unwrap();
        assert!(install(&entry, &archive, dir.path()).is_err());
        assert!(!path.exists());
    }
}

//! Store persistence: one JSON object per line for posts and users, plus
//! a manifest carrying the schema version, ingest counts, and content
//! hashes of both data files. Loading verifies the hashes and counts, so
//! a truncated or edited store is rejected instead of quietly skewing
//! results downstream.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{CommunityUser, CorpusStore, IngestSummary, Post};
use crate::error::{Error, Result};
use crate::manifest::{check_hash, sha256_hex, SCHEMA_VERSION};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const POSTS_FILE: &str = "posts.jsonl";
pub const USERS_FILE: &str = "users.jsonl";

/// Manifest of a persisted corpus store.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreManifest {
    pub schema_version: u32,
    pub kind: String,
    pub posts_file: String,
    pub users_file: String,
    pub posts_sha256: String,
    pub users_sha256: String,
    pub counts: IngestSummary,
}

const KIND: &str = "corpus";

/// Write `store` (and its ingest summary) into directory `out`.
pub fn save_store(store: &CorpusStore, summary: &IngestSummary, out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let posts_bytes = to_jsonl(store.posts())?;
    let users_bytes = to_jsonl(store.users())?;
    let manifest = StoreManifest {
        schema_version: SCHEMA_VERSION,
        kind: KIND.to_string(),
        posts_file: POSTS_FILE.to_string(),
        users_file: USERS_FILE.to_string(),
        posts_sha256: sha256_hex(&posts_bytes),
        users_sha256: sha256_hex(&users_bytes),
        counts: *summary,
    };
    write_file(&out.join(POSTS_FILE), &posts_bytes)?;
    write_file(&out.join(USERS_FILE), &users_bytes)?;
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Integrity(format!("manifest serialization failed: {e}")))?;
    write_file(&out.join(MANIFEST_FILE), format!("{manifest_json}\n").as_bytes())
}

/// Load a store saved by [`save_store`], verifying hashes and counts.
pub fn load_store(dir: &Path) -> Result<(CorpusStore, StoreManifest)> {
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest_text =
        fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: StoreManifest = serde_json::from_str(&manifest_text)
        .map_err(|e| Error::parse(&manifest_path, e.column() as u64, e.to_string()))?;
    if manifest.schema_version != SCHEMA_VERSION {
        return Err(Error::Integrity(format!(
            "store schema version {} is not the supported {}",
            manifest.schema_version, SCHEMA_VERSION
        )));
    }
    if manifest.kind != KIND {
        return Err(Error::Integrity(format!(
            "artifact at {} is a {:?}, not a corpus store",
            dir.display(),
            manifest.kind
        )));
    }

    let posts_path = dir.join(&manifest.posts_file);
    let posts_bytes = fs::read(&posts_path).map_err(|e| Error::io(&posts_path, e))?;
    check_hash(&manifest.posts_sha256, &sha256_hex(&posts_bytes), "posts file")?;
    let users_path = dir.join(&manifest.users_file);
    let users_bytes = fs::read(&users_path).map_err(|e| Error::io(&users_path, e))?;
    check_hash(&manifest.users_sha256, &sha256_hex(&users_bytes), "users file")?;

    let mut store = CorpusStore::new();
    for post in from_jsonl::<Post>(&posts_bytes, &posts_path)? {
        store.insert_post(post?)?;
    }
    for user in from_jsonl::<CommunityUser>(&users_bytes, &users_path)? {
        store.insert_user(user?)?;
    }
    store.finalize();

    let (questions, answers) = store.type_counts();
    let observed = (
        questions,
        answers,
        store.user_count() as u64,
        store.orphan_count(),
    );
    let declared = (
        manifest.counts.questions,
        manifest.counts.answers,
        manifest.counts.users,
        manifest.counts.orphans,
    );
    if observed != declared {
        return Err(Error::Integrity(format!(
            "store contents {observed:?} disagree with manifest counts {declared:?} \
             (questions, answers, users, orphans)"
        )));
    }
    Ok((store, manifest))
}

fn to_jsonl<'a, T: Serialize + 'a>(items: impl Iterator<Item = &'a T>) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for item in items {
        let line = serde_json::to_string(item)
            .map_err(|e| Error::Integrity(format!("record serialization failed: {e}")))?;
        out.extend_from_slice(line.as_bytes());
        out.push(b'\n');
    }
    Ok(out)
}

fn from_jsonl<'a, T: for<'de> Deserialize<'de>>(
    bytes: &'a [u8],
    path: &'a Path,
) -> Result<impl Iterator<Item = Result<T>> + 'a> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::parse(path, e.valid_up_to() as u64, "file is not UTF-8"))?;
    let mut offset = 0u64;
    Ok(text.lines().map(move |line| {
        let line_start = offset;
        offset += line.len() as u64 + 1;
        serde_json::from_str(line).map_err(|e| Error::parse(path, line_start, e.to_string()))
    }))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

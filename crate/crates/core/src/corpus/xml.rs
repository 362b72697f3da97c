//! Streaming parser for the public data-dump XML files.
//!
//! Both `Posts.xml` and `Users.xml` are flat `<row …/>` element lists; a
//! single pass with quick-xml is enough. Parse failures carry the byte
//! offset the reader had reached, so truncated or hand-edited files point
//! at the damage.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, NaiveDateTime, Utc};
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::corpus::{CommunityUser, CorpusStore, Post, PostType};
use crate::error::{Error, Result};

/// Parse a posts dump into `store`. Returns the number of skipped rows
/// (rows whose `PostTypeId` is neither question nor answer).
pub fn parse_posts_file(path: &Path, store: &mut CorpusStore) -> Result<u64> {
    let mut skipped = 0;
    for_each_row(path, |row, pos| {
        match post_from_row(&row, path, pos)? {
            Some(post) => store.insert_post(post)?,
            None => skipped += 1,
        }
        Ok(())
    })?;
    Ok(skipped)
}

/// Parse a users dump into `store`. Rows with a non-positive `Id` (the
/// synthetic community user) are ignored.
pub fn parse_users_file(path: &Path, store: &mut CorpusStore) -> Result<()> {
    for_each_row(path, |row, pos| {
        if let Some(user) = user_from_row(&row, path, pos)? {
            store.insert_user(user)?;
        }
        Ok(())
    })
}

/// Stream `<row>` elements, handing each to `handle` together with the
/// reader's byte position at the start of that element.
fn for_each_row(
    path: &Path,
    mut handle: impl FnMut(BytesStart<'_>, u64) -> Result<()>,
) -> Result<()> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = Reader::from_reader(BufReader::new(file));
    let mut buf = Vec::new();
    loop {
        let pos = reader.buffer_position();
        match reader.read_event_into(&mut buf) {
            Err(e) => {
                return Err(Error::parse(path, reader.buffer_position(), e.to_string()));
            }
            Ok(Event::Eof) => return Ok(()),
            Ok(Event::Empty(e)) | Ok(Event::Start(e)) if e.name().as_ref() == b"row" => {
                handle(e, pos)?;
            }
            Ok(_) => {}
        }
        buf.clear();
    }
}

/// Decode one posts row. `Ok(None)` means the row is a valid non-Q/A type
/// and counts as skipped.
fn post_from_row(row: &BytesStart<'_>, path: &Path, pos: u64) -> Result<Option<Post>> {
    let attrs = RowAttrs::collect(row, path, pos)?;
    let id: u64 = attrs.require_parsed("Id", path, pos)?;
    let post_type = match attrs.require("PostTypeId", path, pos)? {
        "1" => PostType::Question,
        "2" => PostType::Answer,
        _ => return Ok(None),
    };
    let parent_id: Option<u64> = attrs.optional_parsed("ParentId", path, pos)?;
    match post_type {
        PostType::Question if parent_id.is_some() => {
            return Err(Error::parse(
                path,
                pos,
                format!("question row {id} carries ParentId"),
            ));
        }
        PostType::Answer if parent_id.is_none() => {
            return Err(Error::parse(
                path,
                pos,
                format!("answer row {id} is missing ParentId"),
            ));
        }
        _ => {}
    }
    let creation_date = parse_date(attrs.require("CreationDate", path, pos)?, path, pos)?;
    // The dump writes -1 for posts owned by the synthetic community user;
    // those carry no attributable owner.
    let owner_user_id = attrs
        .optional_parsed::<i64>("OwnerUserId", path, pos)?
        .filter(|&o| o > 0)
        .map(|o| o as u64);
    let is_question = post_type == PostType::Question;
    Ok(Some(Post {
        post_id: id,
        post_type,
        owner_user_id,
        parent_id,
        accepted_answer_id: if is_question {
            attrs.optional_parsed("AcceptedAnswerId", path, pos)?
        } else {
            None
        },
        creation_date,
        score: attrs.optional_parsed("Score", path, pos)?.unwrap_or(0),
        view_count: if is_question {
            attrs.optional_parsed("ViewCount", path, pos)?.unwrap_or(0)
        } else {
            0
        },
        favorite_count: if is_question {
            attrs
                .optional_parsed("FavoriteCount", path, pos)?
                .unwrap_or(0)
        } else {
            0
        },
        body_raw: attrs.get("Body").unwrap_or("").to_string(),
    }))
}

/// Decode one users row; `Ok(None)` for the synthetic community user.
fn user_from_row(row: &BytesStart<'_>, path: &Path, pos: u64) -> Result<Option<CommunityUser>> {
    let attrs = RowAttrs::collect(row, path, pos)?;
    let id: i64 = attrs.require_parsed("Id", path, pos)?;
    if id <= 0 {
        return Ok(None);
    }
    Ok(Some(CommunityUser {
        user_id: id as u64,
        display_name: attrs.get("DisplayName").unwrap_or("").to_string(),
        dump_reputation: attrs.optional_parsed("Reputation", path, pos)?.unwrap_or(0),
    }))
}

/// Unescaped attribute values of one row, keyed by attribute name.
struct RowAttrs {
    pairs: Vec<(String, String)>,
}

impl RowAttrs {
    fn collect(row: &BytesStart<'_>, path: &Path, pos: u64) -> Result<Self> {
        let mut pairs = Vec::new();
        for attr in row.attributes() {
            let attr =
                attr.map_err(|e| Error::parse(path, pos, format!("malformed attribute: {e}")))?;
            let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
            let value = attr
                .unescape_value()
                .map_err(|e| {
                    Error::parse(path, pos, format!("bad value for attribute {key}: {e}"))
                })?
                .into_owned();
            pairs.push((key, value));
        }
        Ok(Self { pairs })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn require(&self, key: &str, path: &Path, pos: u64) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::parse(path, pos, format!("row is missing attribute {key}")))
    }

    fn require_parsed<T: FromStr>(&self, key: &str, path: &Path, pos: u64) -> Result<T> {
        parse_attr(self.require(key, path, pos)?, key, path, pos)
    }

    fn optional_parsed<T: FromStr>(&self, key: &str, path: &Path, pos: u64) -> Result<Option<T>> {
        self.get(key)
            .map(|raw| parse_attr(raw, key, path, pos))
            .transpose()
    }
}

fn parse_attr<T: FromStr>(raw: &str, key: &str, path: &Path, pos: u64) -> Result<T> {
    raw.parse().map_err(|_| {
        Error::parse(
            path,
            pos,
            format!("attribute {key} has unparseable value {raw:?}"),
        )
    })
}

/// Dump timestamps are naive ISO-8601 with optional fractional seconds
/// ("2009-03-01T10:00:00.000"); the dump convention is UTC.
fn parse_date(raw: &str, path: &Path, pos: u64) -> Result<DateTime<Utc>> {
    NaiveDateTime::parse_from_str(raw, "%Y-%m-%dT%H:%M:%S%.f")
        .map(|naive| naive.and_utc())
        .map_err(|e| Error::parse(path, pos, format!("bad CreationDate {raw:?}: {e}")))
}

use std::fs;
use std::path::Path;

use cqdist_core::{
    parse_instance, parse_queries, parse_schema, ConjunctiveQuery, Error, Instance, Result, Schema,
};

/// Reads `arg` as a file when such a file exists, otherwise returns it as inline text.
pub fn text_or_file(arg: &str) -> Result<String> {
    let path = Path::new(arg);
    if path.is_file() {
        fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    } else {
        Ok(arg.to_string())
    }
}

pub fn schema(arg: &str) -> Result<Schema> {
    parse_schema(&text_or_file(arg)?)
}

pub fn queries(arg: &str, schema: Option<&Schema>) -> Result<Vec<ConjunctiveQuery>> {
    parse_queries(&text_or_file(arg)?, schema)
}

/// Exactly one query; a file with several queries is rejected.
pub fn query(arg: &str, schema: Option<&Schema>) -> Result<ConjunctiveQuery> {
    let mut all = queries(arg, schema)?;
    match all.len() {
        1 => Ok(all.pop().expect("one element")),
        n => Err(Error::syntax(
            1,
            1,
            format!("expected exactly one query, found {n}"),
        )),
    }
}

pub fn instance(arg: &str, schema: Option<&Schema>) -> Result<Instance> {
    parse_instance(&text_or_file(arg)?, schema)
}

/// The relations used by the given queries, with their arities.
pub fn schema_of<'a>(queries: impl IntoIterator<Item = &'a ConjunctiveQuery>) -> Result<Schema> {
    let mut schema = Schema::new();
    for q in queries {
        for atom in q.body() {
            match schema.arity(&atom.relation) {
                None => schema.add(atom.relation.clone(), atom.arity())?,
                Some(a) if a == atom.arity() => {}
                Some(a) => {
                    return Err(Error::ArityMismatch {
                        relation: atom.relation.clone(),
                        expected: a,
                        found: atom.arity(),
                    })
                }
            }
        }
    }
    Ok(schema)
}

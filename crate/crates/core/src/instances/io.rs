use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::game::Game;

/// Parses and validates a game. `origin` labels parse errors (a path, or
/// something like `"<stdin>"`).
pub fn game_from_json(text: &str, origin: &str) -> Result<Game> {
    let game: Game = serde_json::from_str(text).map_err(|e| Error::Parse {
        origin: origin.to_owned(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    game.validated()
}

/// Pretty-printed JSON. Floats use the shortest representation that parses
/// back to the same value.
pub fn game_to_json(game: &Game) -> String {
    serde_json::to_string_pretty(game).expect("games always serialize")
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Game> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    game_from_json(&text, &path.display().to_string())
}

pub fn save_instance(game: &Game, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = game_to_json(game);
    text.push('\n');
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_owned(), source })
}

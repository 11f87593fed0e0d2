#pragma once

#include <stdexcept>
#include <string>

namespace m3 {

/// Base class for all gateway errors. Subclasses distinguish the
/// failure domain so callers can map them onto exit codes or in-band
/// tool errors without parsing message text.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A database file could not be opened (missing, unreadable, corrupt).
class OpenError : public Error {
public:
    using Error::Error;
};

/// A named object (table, column, eval case file) does not exist.
class NotFoundError : public Error {
public:
    using Error::Error;
};

/// The engine rejected a query. Carries the engine's message verbatim
/// so agents can self-correct from it.
class QueryError : public Error {
public:
    using Error::Error;
};

/// The operation exists on the interface but this adapter does not
/// implement it (remote warehouse stub).
class NotImplementedError : public Error {
public:
    using Error::Error;
};

/// ETL ingestion failure (unreadable source, corrupt gzip, bad header).
class LoadError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration: duplicate tool registration, bad env value,
/// malformed config file entry.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace m3

#pragma once

#include <zlib.h>

#include <filesystem>
#include <string>
#include <vector>

namespace m3::detail {

/// Streaming RFC-4180 reader. Reads through zlib's gz layer, which
/// passes plain files straight through, so one code path covers both
/// *.csv and *.csv.gz. Quoted fields may contain commas, quotes
/// (doubled) and newlines. Not part of the installed interface.
class CsvReader {
public:
    explicit CsvReader(const std::filesystem::path& path);
    ~CsvReader();
    CsvReader(const CsvReader&) = delete;
    CsvReader& operator=(const CsvReader&) = delete;

    /// Reads one record into fields. Returns false at end of input.
    /// Throws LoadError on a corrupt gzip stream, naming the file.
    bool next_record(std::vector<std::string>& fields);

private:
    int next_char();

    gzFile file_ = nullptr;
    std::string path_;
    std::vector<char> buffer_;
    std::size_t pos_ = 0;
    std::size_t len_ = 0;
    int pushback_ = -2;
};

} // namespace m3::detail

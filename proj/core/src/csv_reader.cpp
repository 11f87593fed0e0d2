#include "csv_reader.hpp"

#include "m3/errors.hpp"

namespace m3::detail {

CsvReader::CsvReader(const std::filesystem::path& path)
    : path_(path.string()), buffer_(1 << 16) {
    file_ = gzopen(path_.c_str(), "rb");
    if (file_ == nullptr) {
        throw LoadError("cannot open '" + path_ + "'");
    }
}

CsvReader::~CsvReader() {
    if (file_ != nullptr) gzclose(file_);
}

int CsvReader::next_char() {
    if (pushback_ != -2) {
        const int c = pushback_;
        pushback_ = -2;
        return c;
    }
    if (pos_ >= len_) {
        const int n = gzread(file_, buffer_.data(), static_cast<unsigned>(buffer_.size()));
        if (n < 0) {
            int errnum = 0;
            const char* msg = gzerror(file_, &errnum);
            throw LoadError("corrupt input in '" + path_ + "': " +
                            (msg != nullptr ? msg : "gzip read error"));
        }
        if (n == 0) return -1;
        len_ = static_cast<std::size_t>(n);
        pos_ = 0;
    }
    return static_cast<unsigned char>(buffer_[pos_++]);
}

bool CsvReader::next_record(std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;

    int c = next_char();
    if (c < 0) return false;

    while (true) {
        if (in_quotes) {
            if (c < 0) {
                // Unterminated quote: close out what we have.
                fields.push_back(std::move(field));
                return true;
            }
            if (c == '"') {
                const int d = next_char();
                if (d == '"') {
                    field += '"';
                    c = next_char();
                    continue;
                }
                in_quotes = false;
                c = d;
                continue;
            }
            field += static_cast<char>(c);
            c = next_char();
            continue;
        }
        if (c < 0) {
            fields.push_back(std::move(field));
            return true;
        }
        if (c == '"' && field.empty()) {
            in_quotes = true;
            c = next_char();
            continue;
        }
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            c = next_char();
            continue;
        }
        if (c == '\n') {
            fields.push_back(std::move(field));
            return true;
        }
        if (c == '\r') {
            const int d = next_char();
            if (d != '\n' && d >= 0) {
                pushback_ = d; // lone CR still ends the record
            }
            fields.push_back(std::move(field));
            return true;
        }
        field += static_cast<char>(c);
        c = next_char();
    }
}

} // namespace m3::detail

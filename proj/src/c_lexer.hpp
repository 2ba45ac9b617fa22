#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace libwrap::detail {

struct Token {
    enum class Kind { identifier, number, string, character, punct, end };

    Kind kind = Kind::end;
    std::string text;
    int file = 0;  // index into LexedSource::files
    int line = 0;

    bool is(std::string_view s) const { return (kind == Kind::punct || kind == Kind::identifier) && text == s; }
};

struct LexedSource {
    std::vector<Token> tokens;  // always terminated by an `end` token
    std::vector<std::string> files;
};

// Tokenizes preprocessed C. Line markers (`# 12 "file" 1`) drive locations;
// other directives (#pragma, #ident) are dropped. GNU attribute and
// declspec groups and `__extension__` are removed from the stream.
LexedSource lex_preprocessed(std::string_view source, const std::filesystem::path& base_dir);

}  // namespace libwrap::detail

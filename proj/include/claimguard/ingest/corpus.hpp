#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "claimguard/core/errors.hpp"

namespace claimguard::ingest {

class MalformedFile : public Error {
public:
    MalformedFile(const std::string& what, std::size_t line, std::size_t offset)
        : Error(what), line_(line), offset_(offset) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t line_;
    std::size_t offset_;
};

class TooFewRecords : public Error {
public:
    using Error::Error;
};

struct CorpusRecord {
    std::string record_id;
    std::string claim;
    std::string label;  // raw, as found in the file
    std::vector<std::string> evidence;
    std::vector<std::string> sources;
    std::optional<std::string> author;
    std::optional<std::string> date;
};

struct QuarantinedRecord {
    std::size_t position = 0;  // index in the source array
    std::string record_id;
    std::string raw_label;
    std::string reason;
};

struct ParsedCorpus {
    std::vector<CorpusRecord> records;  // labels all parse
    std::vector<QuarantinedRecord> quarantined;
};

/// Alternate key names per canonical field, tried in order. Canonical names:
/// id, claim, label, evidence, sources, author, date.
struct FieldAliases {
    std::map<std::string, std::vector<std::string>> names;

    static FieldAliases defaults();
    static FieldAliases from_json(const nlohmann::json& j);

    std::vector<std::string> candidates(const std::string& canonical) const;
};

/// The file is a JSON array of objects. Records without an id get
/// "rec-NNNNN" from their array position.
ParsedCorpus parse_corpus(const std::filesystem::path& path,
                          const FieldAliases& aliases = FieldAliases::defaults());
ParsedCorpus parse_corpus_text(std::string_view text,
                               const FieldAliases& aliases = FieldAliases::defaults());

struct SplitSpec {
    double train_fraction = 0.85;
    std::uint64_t seed = 42;
};

struct Split {
    std::vector<CorpusRecord> train;
    std::vector<CorpusRecord> test;
};

/// Seeded shuffle, then |train| = round(train_fraction * N), kept within
/// [1, N - 1] so neither side is empty.
Split split(std::span<const CorpusRecord> records, const SplitSpec& spec);

std::size_t train_size(std::size_t n, double train_fraction);

nlohmann::json to_json(const QuarantinedRecord& q);

} // namespace claimguard::ingest

#include "claimguard/ingest/corpus.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include <fmt/format.h>

#include "claimguard/core/types.hpp"
#include "claimguard/util/rng.hpp"
#include "claimguard/util/text.hpp"

namespace claimguard::ingest {

namespace {

std::size_t line_at(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Byte offsets of each top-level array element. Only called on text that
// already parsed as JSON, so the scan can be permissive.
std::vector<std::size_t> element_offsets(std::string_view text) {
    std::vector<std::size_t> offsets;
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    bool expect_element = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escaped) escaped = false;
            else if (c == '\\') escaped = true;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == ' ' || c == '\n' || c == '\r' || c == '\t') continue;
        if (depth == 1 && expect_element && c != ']') {
            offsets.push_back(i);
            expect_element = false;
        }
        switch (c) {
        case '"': in_string = true; break;
        case '[':
        case '{':
            if (++depth == 1) expect_element = true;
            break;
        case ']':
        case '}': --depth; break;
        case ',':
            if (depth == 1) expect_element = true;
            break;
        default: break;
        }
    }
    return offsets;
}

std::vector<std::string> string_array(const nlohmann::json& value, const std::string& field) {
    if (value.is_string()) return {value.get<std::string>()};
    if (!value.is_array()) throw std::invalid_argument("field '" + field + "' must be an array of strings");
    std::vector<std::string> out;
    for (const auto& v : value) {
        if (!v.is_string()) throw std::invalid_argument("field '" + field + "' must be an array of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

} // namespace

FieldAliases FieldAliases::defaults() {
    return {{
        {"id", {"id", "claim_id"}},
        {"claim", {"claim"}},
        {"label", {"label"}},
        {"evidence", {"evidence"}},
        {"sources", {"sources"}},
        {"author", {"author"}},
        {"date", {"date", "posted"}},
    }};
}

FieldAliases FieldAliases::from_json(const nlohmann::json& j) {
    auto aliases = defaults();
    for (const auto& [canonical, names] : j.items()) {
        if (!aliases.names.contains(canonical)) {
            throw InvalidArgument("unknown corpus field in aliases: " + canonical);
        }
        aliases.names[canonical] = names.get<std::vector<std::string>>();
    }
    return aliases;
}

std::vector<std::string> FieldAliases::candidates(const std::string& canonical) const {
    const auto it = names.find(canonical);
    return it == names.end() ? std::vector<std::string>{canonical} : it->second;
}

ParsedCorpus parse_corpus(const std::filesystem::path& path, const FieldAliases& aliases) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file", path.string());
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_corpus_text(text, aliases);
}

ParsedCorpus parse_corpus_text(std::string_view text, const FieldAliases& aliases) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        throw MalformedFile(fmt::format("corpus is not valid JSON (line {}, offset {}): {}",
                                        line_at(text, offset), offset, e.what()),
                            line_at(text, offset), offset);
    }
    if (!root.is_array()) throw MalformedFile("corpus must be a JSON array of objects", 1, 0);

    const auto offsets = element_offsets(text);
    ParsedCorpus parsed;
    std::set<std::string> seen_ids;
    for (std::size_t pos = 0; pos < root.size(); ++pos) {
        const auto& obj = root[pos];
        const std::size_t offset = pos < offsets.size() ? offsets[pos] : 0;
        const auto fail = [&](const std::string& msg) -> MalformedFile {
            return MalformedFile(fmt::format("record {} (line {}, offset {}): {}", pos,
                                             line_at(text, offset), offset, msg),
                                 line_at(text, offset), offset);
        };
        if (!obj.is_object()) throw fail("record is not an object");

        const auto lookup = [&](const std::string& canonical) -> const nlohmann::json* {
            for (const auto& name : aliases.candidates(canonical)) {
                if (obj.contains(name) && !obj.at(name).is_null()) return &obj.at(name);
            }
            return nullptr;
        };
        const auto required = [&](const std::string& canonical) -> const nlohmann::json& {
            const auto* v = lookup(canonical);
            if (!v) throw fail("missing required field '" + canonical + "'");
            return *v;
        };

        CorpusRecord record;
        try {
            const auto& claim = required("claim");
            if (!claim.is_string()) throw fail("field 'claim' must be a string");
            record.claim = claim.get<std::string>();
            if (util::trim(record.claim).empty()) throw fail("field 'claim' is empty");

            const auto& label = required("label");
            if (!label.is_string()) throw fail("field 'label' must be a string");
            record.label = label.get<std::string>();

            record.evidence = string_array(required("evidence"), "evidence");
            record.sources = string_array(required("sources"), "sources");
            if (const auto* a = lookup("author"); a && a->is_string()) record.author = a->get<std::string>();
            if (const auto* d = lookup("date"); d && d->is_string()) record.date = d->get<std::string>();

            if (const auto* id = lookup("id")) {
                record.record_id = id->is_string() ? id->get<std::string>() : id->dump();
            } else {
                record.record_id = fmt::format("rec-{:05d}", pos);
            }
        } catch (const std::invalid_argument& e) {
            throw fail(e.what());
        }
        if (!seen_ids.insert(record.record_id).second) {
            throw fail("duplicate record id '" + record.record_id + "'");
        }

        try {
            (void)parse_label(util::trim(record.label));
        } catch (const UnrecognizedLabel&) {
            parsed.quarantined.push_back(
                {pos, record.record_id, record.label, "label is not one of true/false/nei"});
            continue;
        }
        parsed.records.push_back(std::move(record));
    }
    return parsed;
}

std::size_t train_size(std::size_t n, double train_fraction) {
    const auto rounded = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    return std::clamp<std::size_t>(rounded, 1, n - 1);
}

Split split(std::span<const CorpusRecord> records, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw InvalidArgument("train_fraction must lie strictly between 0 and 1");
    }
    if (records.size() < 2) throw TooFewRecords("need at least 2 records to split");

    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    util::StableRng rng(spec.seed);
    rng.shuffle(order);

    const std::size_t n_train = train_size(records.size(), spec.train_fraction);
    Split out;
    out.train.reserve(n_train);
    out.test.reserve(records.size() - n_train);
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < n_train ? out.train : out.test).push_back(records[order[i]]);
    }
    return out;
}

nlohmann::json to_json(const QuarantinedRecord& q) {
    return {{"position", q.position}, {"record_id", q.record_id}, {"raw_label", q.raw_label},
            {"reason", q.reason}};
}

} // namespace claimguard::ingest

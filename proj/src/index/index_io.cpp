// Binary index format, all integers little-endian:
//
//   "CGIX" | version u16 | dimension u32 | nlist u32 | count u64
//   centroids: nlist * dimension f32
//   per list: size u64, then size * (id_len u32, id bytes, dimension f32)
//   doc_store: len u64, JSON array of EvidenceDocument
//   crc32 u32 over every preceding byte

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <zlib.h>

#include "claimguard/index/ivf_index.hpp"

namespace claimguard::index {

namespace {

constexpr char kMagic[4] = {'C', 'G', 'I', 'X'};
constexpr std::uint16_t kFormatVersion = 1;

class Writer {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const char*>(data);
        buf_.insert(buf_.end(), p, p + n);
    }

    template <class T>
    void uint(T value) {
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            buf_.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
        }
    }

    void f32(float value) { uint(std::bit_cast<std::uint32_t>(value)); }

    const std::string& buffer() const noexcept { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string_view data) : data_(data) {}

    template <class T>
    T uint() {
        need(sizeof(T));
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        }
        pos_ += sizeof(T);
        return static_cast<T>(v);
    }

    float f32() { return std::bit_cast<float>(uint<std::uint32_t>()); }

    std::string_view bytes(std::size_t n) {
        need(n);
        auto out = data_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    bool at_end() const noexcept { return pos_ == data_.size(); }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw CorruptIndexFile("index file truncated");
    }

    std::string_view data_;
    std::size_t pos_ = 0;
};

std::uint32_t checksum(std::string_view data) {
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}

} // namespace

void IvfIndex::save(const std::filesystem::path& path) const {
    if (!trained()) throw UntrainedIndex();
    Writer w;
    w.bytes(kMagic, sizeof(kMagic));
    w.uint<std::uint16_t>(kFormatVersion);
    w.uint<std::uint32_t>(static_cast<std::uint32_t>(dimension_));
    w.uint<std::uint32_t>(static_cast<std::uint32_t>(centroids_.size()));
    w.uint<std::uint64_t>(docs_.size());
    for (const auto& c : centroids_) {
        for (float x : c) w.f32(x);
    }
    for (const auto& list : lists_) {
        w.uint<std::uint64_t>(list.doc_indices.size());
        for (std::size_t i = 0; i < list.doc_indices.size(); ++i) {
            const auto& id = docs_[list.doc_indices[i]].doc_id;
            w.uint<std::uint32_t>(static_cast<std::uint32_t>(id.size()));
            w.bytes(id.data(), id.size());
            for (std::size_t d = 0; d < dimension_; ++d) w.f32(list.vectors[i * dimension_ + d]);
        }
    }
    nlohmann::json store = nlohmann::json::array();
    for (const auto& doc : docs_) store.push_back(to_json(doc));
    const auto blob = store.dump();
    w.uint<std::uint64_t>(blob.size());
    w.bytes(blob.data(), blob.size());
    w.uint<std::uint32_t>(checksum(w.buffer()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open index file for writing", path.string());
    out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
    if (!out) throw IoError("failed writing index file", path.string());
}

IvfIndex IvfIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open index file", path.string());
    const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

    constexpr std::size_t kHeaderSize = 4 + 2 + 4 + 4 + 8;
    if (data.size() < kHeaderSize + 4) throw CorruptIndexFile("index file truncated");
    if (std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) {
        throw CorruptIndexFile("bad magic; not an index file");
    }
    Reader header(std::string_view(data).substr(4));
    const auto version = header.uint<std::uint16_t>();
    if (version != kFormatVersion) {
        throw CorruptIndexFile(
            fmt::format("unsupported index format version {} (expected {})", version, kFormatVersion));
    }
    const std::string_view body = std::string_view(data).substr(0, data.size() - 4);
    Reader trailer(std::string_view(data).substr(data.size() - 4));
    if (checksum(body) != trailer.uint<std::uint32_t>()) {
        throw CorruptIndexFile("index checksum mismatch");
    }

    Reader r(body.substr(4 + 2));
    const auto dimension = r.uint<std::uint32_t>();
    const auto nlist = r.uint<std::uint32_t>();
    const auto count = r.uint<std::uint64_t>();
    if (dimension == 0 || nlist == 0) throw CorruptIndexFile("index header has zero dimension or nlist");

    IvfIndex index(dimension);
    index.centroids_.assign(nlist, std::vector<float>(dimension));
    for (auto& c : index.centroids_) {
        for (auto& x : c) x = r.f32();
    }
    index.lists_.resize(nlist);

    std::vector<std::pair<std::string, std::vector<float>>> entries;
    std::vector<std::size_t> entry_list;
    for (std::uint32_t l = 0; l < nlist; ++l) {
        const auto size = r.uint<std::uint64_t>();
        for (std::uint64_t i = 0; i < size; ++i) {
            const auto len = r.uint<std::uint32_t>();
            std::string id(r.bytes(len));
            std::vector<float> v(dimension);
            for (auto& x : v) x = r.f32();
            entries.emplace_back(std::move(id), std::move(v));
            entry_list.push_back(l);
        }
    }
    const auto blob_len = r.uint<std::uint64_t>();
    const auto blob = r.bytes(blob_len);
    if (!r.at_end()) throw CorruptIndexFile("trailing bytes after doc store");
    if (entries.size() != count) throw CorruptIndexFile("list sizes do not sum to the document count");

    const auto store = nlohmann::json::parse(blob, nullptr, false);
    if (!store.is_array() || store.size() != count) {
        throw CorruptIndexFile("doc store is not an array of the expected length");
    }
    try {
        for (const auto& j : store) {
            auto doc = document_from_json(j);
            if (index.by_id_.contains(doc.doc_id)) throw CorruptIndexFile("duplicate doc_id " + doc.doc_id);
            index.by_id_.emplace(doc.doc_id, index.docs_.size());
            index.docs_.push_back(std::move(doc));
        }
    } catch (const nlohmann::json::exception& e) {
        throw CorruptIndexFile(std::string("doc store: ") + e.what());
    } catch (const UnrecognizedLabel& e) {
        throw CorruptIndexFile(std::string("doc store: ") + e.what());
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto it = index.by_id_.find(entries[i].first);
        if (it == index.by_id_.end()) throw CorruptIndexFile("list entry without a document: " + entries[i].first);
        auto& list = index.lists_[entry_list[i]];
        list.doc_indices.push_back(it->second);
        list.vectors.insert(list.vectors.end(), entries[i].second.begin(), entries[i].second.end());
    }
    index.freeze();
    return index;
}

} // namespace claimguard::index

#include "shredmap/groundtruth.hpp"

#include "parallel.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <list>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "shredmap/error.hpp"
#include "shredmap/image_io.hpp"

namespace shredmap {

std::string content_hash(const RasterImage& img) {
    std::unique_ptr<EVP_MD_CTX, void (*)(EVP_MD_CTX*)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 unavailable");
    }
    const std::string dims = std::to_string(img.width()) + "x" + std::to_string(img.height()) + ";";
    EVP_DigestUpdate(ctx.get(), dims.data(), dims.size());
    static_assert(sizeof(Rgb) == 3);
    EVP_DigestUpdate(ctx.get(), img.pixels().data(), img.pixels().size() * sizeof(Rgb));
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

GroundTruthEntry make_entry(std::string id, RasterImage image) {
    GroundTruthEntry e;
    e.id = std::move(id);
    e.gray = to_gray(image);
    e.content_hash = content_hash(image);
    e.image = std::move(image);
    return e;
}

GroundTruthSet::GroundTruthSet(std::vector<GroundTruthEntry> entries, int rotation_step,
                               ViewCacheOptions cache)
    : entries_(std::move(entries)),
      step_(rotation_step),
      cache_(std::make_shared<ViewCache>(std::move(cache))) {
    if (entries_.empty()) throw InputError("empty ground truth set");
    if (step_ < 1 || 360 % step_ != 0) {
        throw Error("rotation step must divide 360, got " + std::to_string(step_));
    }
    std::set<std::string> seen;
    for (const auto& e : entries_) {
        if (!seen.insert(e.id).second) throw InputError("duplicate ground truth id '" + e.id + "'");
    }
}

long long GroundTruthSet::search_image_count() const {
    return static_cast<long long>(entries_.size()) * (360 / step_);
}

std::size_t GroundTruthSet::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].id == id) return i;
    }
    throw Error("unknown ground truth id '" + id + "'");
}

const GroundTruthEntry& GroundTruthSet::entry(const std::string& id) const {
    return entries_[index_of(id)];
}

GroundTruthSet load_set(const std::vector<std::filesystem::path>& paths, int step,
                        ViewCacheOptions cache) {
    if (paths.empty()) throw InputError("empty ground truth set");
    std::vector<GroundTruthEntry> entries;
    std::set<std::string> ids;
    for (const auto& path : paths) {
        const std::string id = path.stem().string();
        if (!ids.insert(id).second) {
            throw InputError("duplicate ground truth id '" + id + "' from " + path.string());
        }
        entries.push_back(make_entry(id, read_image(path)));
    }
    return GroundTruthSet(std::move(entries), step, std::move(cache));
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw InputError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> out;
    for (const auto& de : std::filesystem::directory_iterator(dir)) {
        if (de.is_regular_file() && is_image_file(de.path())) out.push_back(de.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

RotatedView view_from_image(const std::string& id, int degrees, int src_w, int src_h,
                            RasterImage rotated) {
    RotatedView v;
    v.entry_id = id;
    v.degrees = normalize_degrees(degrees);
    v.frame = RotationFrame(src_w, src_h, degrees);
    v.gray = to_gray(rotated);
    v.tables = IntegralImage(v.gray);
    v.image = std::move(rotated);
    return v;
}

constexpr char kViewMagic[] = "SHREDMAP-VIEW 1";

void write_view_file(const std::filesystem::path& path, const RasterImage& img) {
    static std::atomic<unsigned long> counter{0};
    std::ostringstream tmp_name;
    tmp_name << path.filename().string() << ".tmp." << ::getpid() << "."
             << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "." << counter++;
    const auto tmp = path.parent_path() / tmp_name.str();
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw InputError("cannot write cache file " + tmp.string());
        out << kViewMagic << "\n" << img.width() << " " << img.height() << "\n";
        out.write(reinterpret_cast<const char*>(img.pixels().data()),
                  static_cast<std::streamsize>(img.pixels().size() * sizeof(Rgb)));
        if (!out) throw InputError("cannot write cache file " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

bool read_view_file(const std::filesystem::path& path, RasterImage& img) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::string magic;
    std::getline(in, magic);
    if (magic != kViewMagic) return false;
    int w = 0;
    int h = 0;
    in >> w >> h;
    in.get();
    if (!in || w <= 0 || h <= 0) return false;
    RasterImage out(w, h);
    in.read(reinterpret_cast<char*>(out.pixels().data()),
            static_cast<std::streamsize>(out.pixels().size() * sizeof(Rgb)));
    if (in.gcount() != static_cast<std::streamsize>(out.pixels().size() * sizeof(Rgb))) return false;
    img = std::move(out);
    return true;
}

}  // namespace

RotatedView compute_view(const GroundTruthEntry& entry, int degrees) {
    return view_from_image(entry.id, degrees, entry.image.width(), entry.image.height(),
                           rotate(entry.image, degrees, kWhite));
}

struct ViewCache::State {
    using Key = std::pair<std::string, int>;  // content hash, degrees
    std::mutex mutex;
    std::list<Key> order;  // most recent first
    std::map<Key, std::pair<std::shared_ptr<const RotatedView>, std::list<Key>::iterator>> views;
};

ViewCache::ViewCache(ViewCacheOptions options)
    : options_(std::move(options)), state_(std::make_unique<State>()) {
    if (!options_.disk_dir.empty()) std::filesystem::create_directories(options_.disk_dir);
}

ViewCache::~ViewCache() = default;

std::filesystem::path ViewCache::disk_path(const GroundTruthEntry& entry, int degrees) const {
    return options_.disk_dir /
           (entry.content_hash.substr(0, 32) + "_" + std::to_string(normalize_degrees(degrees)) + ".view");
}

bool ViewCache::on_disk(const GroundTruthEntry& entry, int degrees) const {
    return !options_.disk_dir.empty() && std::filesystem::exists(disk_path(entry, degrees));
}

std::shared_ptr<const RotatedView> ViewCache::get(const GroundTruthEntry& entry, int degrees) {
    const State::Key key{entry.content_hash, normalize_degrees(degrees)};
    {
        std::lock_guard lock(state_->mutex);
        auto it = state_->views.find(key);
        if (it != state_->views.end()) {
            state_->order.splice(state_->order.begin(), state_->order, it->second.second);
            return it->second.first;
        }
    }

    std::shared_ptr<const RotatedView> view;
    if (!options_.disk_dir.empty()) {
        const auto path = disk_path(entry, degrees);
        RasterImage rotated;
        if (read_view_file(path, rotated)) {
            view = std::make_shared<const RotatedView>(view_from_image(
                entry.id, degrees, entry.image.width(), entry.image.height(), std::move(rotated)));
        } else {
            auto fresh = std::make_shared<RotatedView>(compute_view(entry, degrees));
            write_view_file(path, fresh->image);
            view = std::move(fresh);
        }
    } else {
        view = std::make_shared<const RotatedView>(compute_view(entry, degrees));
    }

    if (options_.memory_capacity == 0) return view;
    std::lock_guard lock(state_->mutex);
    auto it = state_->views.find(key);
    if (it != state_->views.end()) return it->second.first;
    state_->order.push_front(key);
    state_->views.emplace(key, std::make_pair(view, state_->order.begin()));
    while (state_->views.size() > options_.memory_capacity) {
        state_->views.erase(state_->order.back());
        state_->order.pop_back();
    }
    return view;
}

std::shared_ptr<const RotatedView> rotated_view(const GroundTruthSet& set, const std::string& id,
                                                int degrees) {
    const GroundTruthEntry& e = set.entry(id);
    if (normalize_degrees(degrees) % set.rotation_step() != 0) {
        throw Error("rotation " + std::to_string(degrees) + " is not a multiple of step " +
                    std::to_string(set.rotation_step()));
    }
    return set.cache().get(e, degrees);
}

void precompute_views(const GroundTruthSet& set) {
    const int per_entry = 360 / set.rotation_step();
    const int total = static_cast<int>(set.entries().size()) * per_entry;
    detail::FirstError errors;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < total; ++i) {
        errors.run([&] {
            const auto& e = set.entries()[static_cast<std::size_t>(i / per_entry)];
            const int deg = (i % per_entry) * set.rotation_step();
            if (!set.cache().on_disk(e, deg)) set.cache().get(e, deg);
        });
    }
    errors.rethrow();
}

}  // namespace shredmap

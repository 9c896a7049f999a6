#pragma once

// Reference banknote faces and their rotated search views.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "shredmap/image.hpp"

namespace shredmap {

struct GroundTruthEntry {
    std::string id;
    RasterImage image;
    GrayImage gray;
    std::string content_hash;  // hex SHA-256 of dimensions + RGB bytes
};

// A reference face rotated by a fixed angle, with the luminance tables the
// matcher needs and exact coordinate maps to and from the unrotated face.
struct RotatedView {
    std::string entry_id;
    int degrees = 0;
    RasterImage image;
    GrayImage gray;
    IntegralImage tables;
    RotationFrame frame{1, 1, 0};

    // unrotated face -> rotated view
    PointF forward(PointF p) const { return frame.to_rotated(p); }
    // rotated view -> unrotated face
    PointF inverse(PointF p) const { return frame.to_source(p); }
};

class ViewCache;

struct ViewCacheOptions {
    std::filesystem::path disk_dir;  // empty: no on-disk cache
    std::size_t memory_capacity = 16;
};

class GroundTruthSet {
public:
    GroundTruthSet(std::vector<GroundTruthEntry> entries, int rotation_step,
                   ViewCacheOptions cache = {});

    const std::vector<GroundTruthEntry>& entries() const { return entries_; }
    int rotation_step() const { return step_; }
    long long search_image_count() const;

    const GroundTruthEntry& entry(const std::string& id) const;
    std::size_t index_of(const std::string& id) const;

    ViewCache& cache() const { return *cache_; }

private:
    std::vector<GroundTruthEntry> entries_;
    int step_;
    std::shared_ptr<ViewCache> cache_;
};

std::string content_hash(const RasterImage& img);

// Ids come from file stems. Throws InputError for an empty list, an
// unreadable file or a duplicate id, naming the path.
GroundTruthSet load_set(const std::vector<std::filesystem::path>& paths, int step,
                        ViewCacheOptions cache = {});

// All PNG/JPEG files in `dir`, sorted by file name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

GroundTruthEntry make_entry(std::string id, RasterImage image);

// Builds a view without consulting any cache.
RotatedView compute_view(const GroundTruthEntry& entry, int degrees);

// Cached view for (id, degrees). Throws Error for an unknown id or for an
// angle that is not a multiple of the set's step.
std::shared_ptr<const RotatedView> rotated_view(const GroundTruthSet& set, const std::string& id,
                                                int degrees);

// Fills the on-disk cache with every rotation of every entry.
void precompute_views(const GroundTruthSet& set);

// Thread-safe memory LRU in front of an optional write-temp-then-rename disk
// store keyed by (content hash, degrees).
class ViewCache {
public:
    explicit ViewCache(ViewCacheOptions options);
    ~ViewCache();

    std::shared_ptr<const RotatedView> get(const GroundTruthEntry& entry, int degrees);
    bool on_disk(const GroundTruthEntry& entry, int degrees) const;
    std::filesystem::path disk_path(const GroundTruthEntry& entry, int degrees) const;
    const ViewCacheOptions& options() const { return options_; }

private:
    struct State;
    ViewCacheOptions options_;
    std::unique_ptr<State> state_;
};

}  // namespace shredmap

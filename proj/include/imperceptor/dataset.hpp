#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "imperceptor/csv.hpp"
#include "imperceptor/image.hpp"
#include "imperceptor/synth.hpp"

namespace imperceptor {

constexpr const char* kManifestHeader = "path,identity,gender,skin,age,variant,split";

struct ManifestRow {
    std::string path;  // relative to the manifest file
    int identity = 0;
    int gender = 0;
    Skin skin = Skin::light;
    int age = 0;
    int variant = 0;
    std::string split;  // "train" or "test"

    Attributes attributes() const { return Attributes{gender, skin, age}; }
};

inline void write_manifest(const std::vector<ManifestRow>& rows,
                           const std::filesystem::path& path) {
    CsvWriter w(path);
    w.raw_line(kManifestHeader);
    for (const auto& r : rows) {
        w.row(r.path, r.identity, r.gender, skin_to_string(r.skin), r.age, r.variant, r.split);
    }
}

inline std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
    auto lines = read_lines(path);
    if (lines.empty() || lines[0] != kManifestHeader) {
        throw ManifestError("bad manifest header in " + path.string());
    }
    std::vector<ManifestRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto f = split_csv_line(lines[i]);
        if (f.size() != 7) {
            throw ManifestError("manifest row " + std::to_string(i) + " has " +
                                std::to_string(f.size()) + " fields");
        }
        ManifestRow r;
        r.path = f[0];
        r.identity = parse_int(f[1]);
        r.gender = parse_int(f[2]);
        r.skin = skin_from_string(f[3]);
        r.age = parse_int(f[4]);
        r.variant = parse_int(f[5]);
        r.split = f[6];
        if (r.split != "train" && r.split != "test") {
            throw ManifestError("manifest row " + std::to_string(i) + ": bad split '" +
                                r.split + "'");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

struct GroupPlanEntry {
    AttributeRequest request;
    int identity_count = 0;
    int variants_per_identity = 0;
};

// The four attribute groups the campaigns use; index 0 is the attacker group.
inline std::vector<AttributeRequest> standard_group_requests() {
    return {
        AttributeRequest{1, Skin::light, 0},  // reference group (a)
        AttributeRequest{0, Skin::light, 0},  // cross gender   (b)
        AttributeRequest{1, Skin::dark, 0},   // cross skin     (c)
        AttributeRequest{1, Skin::light, 1},  // cross age      (d)
    };
}

inline std::vector<GroupPlanEntry> standard_group_plan(int identities_per_group,
                                                       int variants_per_identity) {
    std::vector<GroupPlanEntry> plan;
    for (const auto& req : standard_group_requests()) {
        plan.push_back({req, identities_per_group, variants_per_identity});
    }
    return plan;
}

struct BuildOutput {
    std::filesystem::path manifest_path;
    std::vector<ManifestRow> rows;
};

// Renders every (identity, variant) to a PPM under out_dir/images and writes
// out_dir/manifest.csv. Variant 0 is the canonical zero-jitter portrait and
// becomes the identity's test image; the rest are jittered training rows.
// Byte-for-byte deterministic in (master_seed, plan).
inline BuildOutput build_dataset(std::uint64_t master_seed,
                                 const std::vector<GroupPlanEntry>& plan,
                                 const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string());

    BuildOutput out;
    out.manifest_path = out_dir / "manifest.csv";

    bool any_rows = false;
    for (const auto& entry : plan) {
        if (entry.identity_count > 0) any_rows = true;
        if (entry.identity_count > 0 && entry.variants_per_identity < 2) {
            throw ConfigError("each identity needs at least 2 variants (1 train + 1 test)");
        }
    }
    if (any_rows) {
        fs::create_directories(out_dir / "images", ec);
        if (ec) throw IoError("cannot create image directory under " + out_dir.string());
    }

    int identity = 0;
    for (const auto& entry : plan) {
        for (int i = 0; i < entry.identity_count; ++i, ++identity) {
            const IdentitySpec spec = gen_identity(master_seed, identity, entry.request);
            const Attributes attrs = spec.attributes();
            for (int v = 0; v < entry.variants_per_identity; ++v) {
                const Image img =
                    v == 0 ? render(spec, VariantParams{})
                           : render(spec, derive_seed(master_seed, 7000 + static_cast<std::uint64_t>(identity), static_cast<std::uint64_t>(v)));
                char name[40];
                std::snprintf(name, sizeof(name), "images/id%03d_v%02d.ppm", identity, v);
                write_ppm(img, out_dir / name);
                ManifestRow row;
                row.path = name;
                row.identity = identity;
                row.gender = attrs.gender;
                row.skin = attrs.skin;
                row.age = attrs.age;
                row.variant = v;
                row.split = v == 0 ? "test" : "train";
                out.rows.push_back(std::move(row));
            }
        }
    }
    write_manifest(out.rows, out.manifest_path);
    return out;
}

struct DatasetEntry {
    ManifestRow row;
    Image image;
};

struct Dataset {
    std::vector<DatasetEntry> entries;  // sorted by (identity, variant)
    int num_identities = 0;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;

    const DatasetEntry& canonical_test(int identity) const {
        for (const auto& e : entries) {
            if (e.row.identity == identity && e.row.split == "test") return e;
        }
        throw ManifestError("no test image for identity " + std::to_string(identity));
    }

    // First k images of an identity in variant order (pose/lighting set).
    std::vector<const Image*> first_variants(int identity, int k) const {
        std::vector<const Image*> out;
        for (const auto& e : entries) {
            if (e.row.identity == identity && static_cast<int>(out.size()) < k) {
                out.push_back(&e.image);
            }
        }
        if (static_cast<int>(out.size()) < k) {
            throw ConfigError("identity " + std::to_string(identity) + " has fewer than " +
                              std::to_string(k) + " variants");
        }
        return out;
    }

    Attributes attributes_of(int identity) const {
        for (const auto& e : entries) {
            if (e.row.identity == identity) return e.row.attributes();
        }
        throw ManifestError("unknown identity " + std::to_string(identity));
    }

    std::vector<int> identities_with(const AttributeRequest& req) const {
        std::vector<int> out;
        for (int id = 0; id < num_identities; ++id) {
            const Attributes a = attributes_of(id);
            if (req.gender && *req.gender != a.gender) continue;
            if (req.skin && *req.skin != a.skin) continue;
            if (req.age && *req.age != a.age) continue;
            out.push_back(id);
        }
        return out;
    }
};

inline Dataset ingest(const std::filesystem::path& manifest_path) {
    auto rows = read_manifest(manifest_path);
    const auto base = manifest_path.parent_path();

    Dataset ds;
    std::set<int> ids;
    std::map<int, int> train_count, test_count;
    for (auto& row : rows) {
        DatasetEntry e;
        e.image = read_ppm(base / row.path);
        ids.insert(row.identity);
        (row.split == "train" ? train_count : test_count)[row.identity]++;
        e.row = std::move(row);
        ds.entries.push_back(std::move(e));
    }
    std::sort(ds.entries.begin(), ds.entries.end(), [](const auto& a, const auto& b) {
        return std::tie(a.row.identity, a.row.variant) < std::tie(b.row.identity, b.row.variant);
    });

    ds.num_identities = static_cast<int>(ids.size());
    for (int expect = 0; const int id : ids) {
        if (id != expect++) {
            throw ManifestError("identity ids are not contiguous 0..N-1 (saw " +
                                std::to_string(id) + ")");
        }
    }
    for (int id = 0; id < ds.num_identities; ++id) {
        if (train_count[id] < 1 || test_count[id] < 1) {
            throw ManifestError("identity " + std::to_string(id) +
                                " lacks a train or test row");
        }
    }
    for (std::size_t i = 0; i < ds.entries.size(); ++i) {
        (ds.entries[i].row.split == "train" ? ds.train_indices : ds.test_indices).push_back(i);
    }
    return ds;
}

}  // namespace imperceptor

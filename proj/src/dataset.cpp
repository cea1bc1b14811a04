#include "dunedetect/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "dunedetect/image_io.hpp"
#include "dunedetect/rng.hpp"

namespace dunedetect {

namespace {

using nlohmann::json;

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

double parse_double_token(std::string_view tok, int line_no, const char* field) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError(line_no, std::string("non-numeric ") + field + " '" + std::string(tok) + "'");
    return v;
}

long parse_int_token(std::string_view tok, int line_no, const char* field) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError(line_no, std::string("non-numeric ") + field + " '" + std::string(tok) + "'");
    return v;
}

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

void check_box_in_image(const NormBox& b, int line_no) {
    if (b.x0() < -kBoxEdgeTol)
        throw ParseError(line_no, "box left edge " + fmt_g(b.x0()) + " < 0");
    if (b.x1() > 1.0 + kBoxEdgeTol)
        throw ParseError(line_no, "box right edge " + fmt_g(b.x1()) + " > 1");
    if (b.y0() < -kBoxEdgeTol)
        throw ParseError(line_no, "box top edge " + fmt_g(b.y0()) + " < 0");
    if (b.y1() > 1.0 + kBoxEdgeTol)
        throw ParseError(line_no, "box bottom edge " + fmt_g(b.y1()) + " > 1");
}

std::string read_text_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    out << text;
    if (!out) throw IoError("write failed for " + file.string());
}

bool filesystem_safe(const std::string& id) {
    if (id.empty()) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
    });
}

const std::array<const char*, 3> kSplitNames{"train", "val", "test"};

}  // namespace

std::vector<Annotation> parse_label_file(std::string_view text, int class_count) {
    std::vector<Annotation> out;
    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t eol = text.find('\n', pos);
        const std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        ++line_no;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        const auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks.size() != 5)
            throw ParseError(line_no, "expected 5 fields, got " + std::to_string(toks.size()));

        Annotation a;
        const long cls = parse_int_token(toks[0], line_no, "class_id");
        if (cls < 0 || cls >= class_count)
            throw ParseError(line_no, "class_id " + std::to_string(cls) + " out of range [0," +
                                          std::to_string(class_count) + ")");
        a.class_id = static_cast<int>(cls);
        a.box.cx = parse_double_token(toks[1], line_no, "cx");
        a.box.cy = parse_double_token(toks[2], line_no, "cy");
        a.box.w = parse_double_token(toks[3], line_no, "w");
        a.box.h = parse_double_token(toks[4], line_no, "h");

        const char* names[4] = {"cx", "cy", "w", "h"};
        const double vals[4] = {a.box.cx, a.box.cy, a.box.w, a.box.h};
        for (int i = 0; i < 4; ++i)
            if (!(vals[i] >= 0.0 && vals[i] <= 1.0))
                throw ParseError(line_no, std::string(names[i]) + " " + fmt_g(vals[i]) +
                                              " outside [0,1]");
        if (a.box.w <= 0.0) throw ParseError(line_no, "box width must be positive");
        if (a.box.h <= 0.0) throw ParseError(line_no, "box height must be positive");
        check_box_in_image(a.box, line_no);
        out.push_back(a);
    }
    return out;
}

std::string serialize_labels(const std::vector<Annotation>& annotations) {
    std::string out;
    char buf[128];
    for (const auto& a : annotations) {
        std::snprintf(buf, sizeof(buf), "%d %.6f %.6f %.6f %.6f\n", a.class_id, a.box.cx,
                      a.box.cy, a.box.w, a.box.h);
        out += buf;
    }
    return out;
}

DatasetSplit split_dataset(const std::vector<std::string>& ids,
                           const std::array<double, 3>& ratio, uint64_t seed) {
    {
        std::unordered_set<std::string_view> seen;
        for (const auto& id : ids)
            if (!seen.insert(id).second) throw ValidationError("duplicate id '" + id + "'");
    }
    const double sum = ratio[0] + ratio[1] + ratio[2];
    if (std::abs(sum - 1.0) > 1e-9)
        throw ValidationError("split ratios sum to " + fmt_g(sum) + ", expected 1");
    for (double r : ratio)
        if (r < 0.0) throw ValidationError("negative split ratio");

    const size_t n = ids.size();
    // floor sizes, then hand the remainder to train, then val
    std::array<size_t, 3> sizes{};
    for (int i = 0; i < 3; ++i)
        sizes[i] = static_cast<size_t>(std::floor(ratio[i] * static_cast<double>(n) + 1e-9));
    size_t rem = n - (sizes[0] + sizes[1] + sizes[2]);
    for (int i = 0; rem > 0; i = (i + 1) % 3, --rem) ++sizes[i];

    std::vector<std::string> order = ids;
    Rng rng(derive_seed(seed, "split"));
    rng.shuffle(order);

    DatasetSplit out;
    out.split_ratio = ratio;
    out.train.assign(order.begin(), order.begin() + sizes[0]);
    out.val.assign(order.begin() + sizes[0], order.begin() + sizes[0] + sizes[1]);
    out.test.assign(order.begin() + sizes[0] + sizes[1], order.end());
    return out;
}

std::string DatasetDescriptor::to_json_string() const {
    json j;
    j["classes"] = classes;
    j["splits"] = split_ratio;
    j["seed"] = seed;
    return j.dump(2) + "\n";
}

DatasetDescriptor DatasetDescriptor::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(1, std::string("descriptor: ") + e.what());
    }
    DatasetDescriptor d;
    if (!j.contains("classes") || !j["classes"].is_array() || j["classes"].empty())
        throw ValidationError("descriptor: missing or empty 'classes'");
    d.classes = j["classes"].get<std::vector<std::string>>();
    if (j.contains("splits")) {
        const auto v = j["splits"].get<std::vector<double>>();
        if (v.size() != 3) throw ValidationError("descriptor: 'splits' must have 3 entries");
        std::copy(v.begin(), v.end(), d.split_ratio.begin());
    }
    if (j.contains("seed")) d.seed = j["seed"].get<uint64_t>();
    return d;
}

DatasetDescriptor DatasetDescriptor::load(const std::filesystem::path& file) {
    return from_json_string(read_text_file(file));
}

void DatasetDescriptor::save(const std::filesystem::path& file) const {
    write_text_file(file, to_json_string());
}

std::string DatasetManifest::to_json_string() const {
    json j;
    j["total_images"] = total_images;
    j["total_boxes"] = total_boxes;
    j["split_counts"] = split_counts;
    j["provenance_counts"] = provenance_counts;
    j["class_box_counts"] = class_box_counts;
    j["boxes_clamped"] = boxes_clamped;
    j["boxes_dropped"] = boxes_dropped;
    return j.dump(2) + "\n";
}

DatasetManifest summarize(const std::vector<LabeledImage>& images,
                          const DatasetSplit& split, const DatasetDescriptor& desc) {
    DatasetManifest m;
    m.total_images = images.size();
    m.split_counts["train"] = split.train.size();
    m.split_counts["val"] = split.val.size();
    m.split_counts["test"] = split.test.size();
    for (const auto& img : images) {
        ++m.provenance_counts[to_string(img.provenance)];
        for (const auto& a : img.annotations) {
            ++m.total_boxes;
            const std::string name = a.class_id < desc.class_count()
                                         ? desc.classes[a.class_id]
                                         : "class_" + std::to_string(a.class_id);
            ++m.class_box_counts[name];
        }
    }
    return m;
}

DatasetManifest write_dataset(const std::filesystem::path& dir,
                              const std::vector<LabeledImage>& images,
                              const DatasetSplit& split,
                              const DatasetDescriptor& desc) {
    std::unordered_map<std::string, const LabeledImage*> by_id;
    for (const auto& img : images) {
        img.validate(desc.class_count());
        if (!filesystem_safe(img.id))
            throw ValidationError("id '" + img.id + "' is not filesystem-safe");
        if (!by_id.emplace(img.id, &img).second)
            throw ValidationError("id collision: '" + img.id + "'");
    }

    const std::array<const std::vector<std::string>*, 3> lists{&split.train, &split.val,
                                                               &split.test};
    size_t listed = 0;
    std::error_code ec;
    for (int s = 0; s < 3; ++s) {
        std::filesystem::create_directories(dir / "images" / kSplitNames[s], ec);
        if (ec) throw IoError("cannot create " + (dir / "images" / kSplitNames[s]).string() +
                              ": " + ec.message());
        std::filesystem::create_directories(dir / "labels" / kSplitNames[s], ec);
        if (ec) throw IoError("cannot create " + (dir / "labels" / kSplitNames[s]).string() +
                              ": " + ec.message());
        for (const auto& id : *lists[s]) {
            const auto it = by_id.find(id);
            if (it == by_id.end())
                throw ValidationError("split references unknown id '" + id + "'");
            const LabeledImage& img = *it->second;
            write_png_rgb8(dir / "images" / kSplitNames[s] / (id + ".png"), img.width_px,
                           img.height_px, img.pixels.data());
            write_text_file(dir / "labels" / kSplitNames[s] / (id + ".txt"),
                            serialize_labels(img.annotations));
            ++listed;
        }
    }
    if (listed != images.size())
        throw ValidationError("split covers " + std::to_string(listed) + " of " +
                              std::to_string(images.size()) + " images");

    desc.save(dir / "descriptor.json");
    return summarize(images, split, desc);
}

LoadedDataset read_dataset(const std::filesystem::path& dir) {
    LoadedDataset out;
    out.desc = DatasetDescriptor::load(dir / "descriptor.json");
    out.split.split_ratio = out.desc.split_ratio;

    std::array<std::vector<std::string>*, 3> lists{&out.split.train, &out.split.val,
                                                   &out.split.test};
    for (int s = 0; s < 3; ++s) {
        const auto img_dir = dir / "images" / kSplitNames[s];
        if (!std::filesystem::exists(img_dir)) continue;
        // directory iteration order is unspecified; sort for determinism
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(img_dir))
            if (e.path().extension() == ".png") files.push_back(e.path());
        std::sort(files.begin(), files.end());

        for (const auto& f : files) {
            LabeledImage img;
            img.id = f.stem().string();
            read_png_rgb8(f, img.width_px, img.height_px, img.pixels);
            const auto label_file = dir / "labels" / kSplitNames[s] / (img.id + ".txt");
            if (std::filesystem::exists(label_file)) {
                try {
                    img.annotations =
                        parse_label_file(read_text_file(label_file), out.desc.class_count());
                } catch (const ParseError& e) {
                    throw ValidationError(label_file.string() + ": " + e.what());
                }
            }
            // provenance is not persisted in the on-disk layout
            img.provenance =
                img.annotations.empty() ? Provenance::negative : Provenance::raw;
            lists[s]->push_back(img.id);
            out.images.push_back(std::move(img));
        }
    }
    if (out.images.empty()) throw ValidationError("no images found under " + dir.string());
    return out;
}

}  // namespace dunedetect

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>

#include "rotsiam/image.hpp"

#ifdef ROTSIAM_WITH_PNG
#include <png.h>
#endif
#ifdef ROTSIAM_WITH_JPEG
#include <jpeglib.h>
#endif

namespace rotsiam {

namespace {

std::runtime_error io_error(const std::filesystem::path& p, const std::string& what) {
    return std::runtime_error("image " + p.string() + ": " + what);
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

Image load_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error(path, "cannot open");
    const std::string magic = next_token(in);
    if (magic.size() != 2 || magic[0] != 'P') throw io_error(path, "not a PNM file");
    const char kind = magic[1];
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
        throw io_error(path, "unsupported PNM variant " + magic);
    }
    const int channels = (kind == '3' || kind == '6') ? 3 : 1;
    int width = 0, height = 0, maxval = 0;
    try {
        width = std::stoi(next_token(in));
        height = std::stoi(next_token(in));
        maxval = std::stoi(next_token(in));
    } catch (const std::exception&) {
        throw io_error(path, "malformed header");
    }
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
        throw io_error(path, "bad header values");
    }
    Image img(width, height, channels);
    auto px = img.pixels();
    const float denom = static_cast<float>(maxval);
    if (kind == '2' || kind == '3') {
        for (auto& v : px) {
            const std::string tok = next_token(in);
            if (tok.empty()) throw io_error(path, "truncated data");
            v = static_cast<float>(std::stoi(tok)) / denom;
        }
        return img;
    }
    const std::size_t bytes_per = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(px.size() * bytes_per);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw io_error(path, "truncated data");
    for (std::size_t i = 0; i < px.size(); ++i) {
        const unsigned v = bytes_per == 1 ? raw[i] : (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
        px[i] = static_cast<float>(v) / denom;
    }
    return img;
}

#ifdef ROTSIAM_WITH_PNG
Image load_png(const std::filesystem::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
        throw io_error(path, image.message);
    }
    const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
    image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    std::vector<unsigned char> buf(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
        png_image_free(&image);
        throw io_error(path, image.message);
    }
    Image img(static_cast<int>(image.width), static_cast<int>(image.height), gray ? 1 : 3);
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = buf[i] / 255.0f;
    return img;
}
#endif

#ifdef ROTSIAM_WITH_JPEG
Image load_jpeg(const std::filesystem::path& path) {
    std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "rb"), &std::fclose);
    if (!fp) throw io_error(path, "cannot open");
    jpeg_decompress_struct cinfo{};
    jpeg_error_mgr jerr{};
    cinfo.err = jpeg_std_error(&jerr);
    jerr.error_exit = [](j_common_ptr info) {
        char msg[JMSG_LENGTH_MAX];
        (*info->err->format_message)(info, msg);
        throw std::runtime_error(msg);
    };
    try {
        jpeg_create_decompress(&cinfo);
        jpeg_stdio_src(&cinfo, fp.get());
        jpeg_read_header(&cinfo, TRUE);
        if (cinfo.num_components != 1) cinfo.out_color_space = JCS_RGB;
        jpeg_start_decompress(&cinfo);
        const int channels = cinfo.output_components == 1 ? 1 : 3;
        Image img(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height), channels);
        std::vector<unsigned char> row(static_cast<std::size_t>(cinfo.output_width) * cinfo.output_components);
        auto px = img.pixels();
        std::size_t k = 0;
        while (cinfo.output_scanline < cinfo.output_height) {
            unsigned char* rp = row.data();
            jpeg_read_scanlines(&cinfo, &rp, 1);
            for (unsigned char v : row) px[k++] = v / 255.0f;
        }
        jpeg_finish_decompress(&cinfo);
        jpeg_destroy_decompress(&cinfo);
        return img;
    } catch (const std::runtime_error& e) {
        jpeg_destroy_decompress(&cinfo);
        throw io_error(path, e.what());
    }
}
#endif

}  // namespace

Image load_image(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return load_pnm(path);
#ifdef ROTSIAM_WITH_PNG
    if (ext == ".png") return load_png(path);
#endif
#ifdef ROTSIAM_WITH_JPEG
    if (ext == ".jpg" || ext == ".jpeg") return load_jpeg(path);
#endif
    throw io_error(path, "unsupported image format '" + ext + "'");
}

void save_pnm(const Image& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error(path, "cannot write");
    out << (img.channels() == 1 ? "P5" : "P6") << '\n' << img.width() << ' ' << img.height() << "\n255\n";
    const auto px = img.pixels();
    std::vector<unsigned char> raw(px.size());
    for (std::size_t i = 0; i < px.size(); ++i) {
        raw[i] = static_cast<unsigned char>(std::lround(std::clamp(px[i], 0.0f, 1.0f) * 255.0f));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw io_error(path, "write failed");
}

}  // namespace rotsiam

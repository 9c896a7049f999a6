#include "shredmap/image_io.hpp"

#include <png.h>
// jpeglib.h needs FILE and size_t declared first.
#include <cstdio>
#include <jpeglib.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <csetjmp>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "shredmap/error.hpp"

namespace shredmap {

namespace {

RasterImage read_png(const std::filesystem::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw InputError("cannot decode PNG " + path.string() + ": " + image.message);
    }
    image.format = PNG_FORMAT_RGB;
    std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
    png_color white{255, 255, 255};
    if (!png_image_finish_read(&image, &white, buffer.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw InputError("cannot decode PNG " + path.string() + ": " + msg);
    }
    RasterImage out(static_cast<int>(image.width), static_cast<int>(image.height));
    auto px = out.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] = {buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
    }
    return out;
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

// Kept free of C++ objects with destructors: libjpeg reports errors via
// longjmp back into this frame.
bool decode_jpeg(FILE* file, JpegErrorManager& err, std::vector<std::uint8_t>* data, int* width,
                 int* height) {
    jpeg_decompress_struct cinfo{};
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    *width = static_cast<int>(cinfo.output_width);
    *height = static_cast<int>(cinfo.output_height);
    data->resize(static_cast<std::size_t>(*width) * *height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = data->data() + static_cast<std::size_t>(cinfo.output_scanline) * *width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return true;
}

RasterImage read_jpeg(const std::filesystem::path& path) {
    std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "rb"), &std::fclose);
    if (!file) throw InputError("cannot open " + path.string());
    JpegErrorManager err{};
    std::vector<std::uint8_t> data;
    int width = 0;
    int height = 0;
    if (!decode_jpeg(file.get(), err, &data, &width, &height)) {
        throw InputError("cannot decode JPEG " + path.string() + ": " + err.message);
    }
    RasterImage out(width, height);
    auto px = out.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] = {data[3 * i], data[3 * i + 1], data[3 * i + 2]};
    }
    return out;
}

}  // namespace

RasterImage read_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::array<unsigned char, 8> sig{};
    in.read(reinterpret_cast<char*>(sig.data()), sig.size());
    if (in.gcount() >= 8 && png_sig_cmp(sig.data(), 0, 8) == 0) return read_png(path);
    if (in.gcount() >= 3 && sig[0] == 0xFF && sig[1] == 0xD8 && sig[2] == 0xFF) return read_jpeg(path);
    throw InputError("unsupported image format: " + path.string());
}

void write_png(const std::filesystem::path& path, const RasterImage& img) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = PNG_FORMAT_RGB;
    std::vector<png_byte> buffer;
    buffer.reserve(img.pixels().size() * 3);
    for (const Rgb& p : img.pixels()) {
        buffer.push_back(p.r);
        buffer.push_back(p.g);
        buffer.push_back(p.b);
    }
    if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr)) {
        throw InputError("cannot write PNG " + path.string() + ": " + image.message);
    }
}

bool is_image_file(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace shredmap

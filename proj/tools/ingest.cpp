#include "ingest.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace nltfnn {

namespace fs = std::filesystem;

Tensor3 ingest_slices(const fs::path &dir) {
    if (!fs::is_directory(dir))
        throw std::runtime_error("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().filename().string().front() != '.')
            files.push_back(entry.path());
    if (files.empty())
        throw std::runtime_error("no images found in " + dir.string());
    std::sort(files.begin(), files.end());

    Tensor3 out;
    for (std::size_t k = 0; k < files.size(); ++k) {
        const cv::Mat img = cv::imread(files[k].string(), cv::IMREAD_GRAYSCALE | cv::IMREAD_ANYDEPTH);
        if (img.empty())
            throw std::runtime_error("cannot read image " + files[k].string());
        double scale = 0;
        switch (img.depth()) {
        case CV_8U:
            scale = 1.0 / 255.0;
            break;
        case CV_16U:
            scale = 1.0 / 65535.0;
            break;
        default:
            throw std::runtime_error("unsupported pixel depth in " + files[k].string());
        }
        if (k == 0)
            out = Tensor3({img.rows, img.cols, static_cast<Index>(files.size())});
        else if (img.rows != out.dims()[0] || img.cols != out.dims()[1])
            throw std::runtime_error("image " + files[k].string() + " is " + std::to_string(img.rows) + "x" +
                                     std::to_string(img.cols) + ", expected " + std::to_string(out.dims()[0]) +
                                     "x" + std::to_string(out.dims()[1]));
        cv::Mat as_double;
        img.convertTo(as_double, CV_64F, scale);
        // rows -> mode 1, columns -> mode 2
        for (int r = 0; r < img.rows; ++r)
            for (int c = 0; c < img.cols; ++c)
                out(r, c, static_cast<Index>(k)) = as_double.at<double>(r, c);
    }
    return out;
}

} // namespace nltfnn

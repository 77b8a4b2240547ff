#include "ingest.hpp"

#include <gtest/gtest.h>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;
using namespace nltfnn;

namespace {

class TempDir {
  public:
    explicit TempDir(const std::string &name) : path_(fs::temp_directory_path() / ("nltfnn_ingest_" + name)) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path &path() const { return path_; }

  private:
    fs::path path_;
};

cv::Mat ramp(int rows, int cols) {
    cv::Mat m(rows, cols, CV_8U);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            m.at<unsigned char>(r, c) = static_cast<unsigned char>((r * 31 + c * 7) % 256);
    return m;
}

} // namespace

TEST(Ingest, IdenticalImagesGiveConstantTubes) {
    TempDir dir("identical");
    const cv::Mat img = ramp(8, 8);
    for (const char *name : {"a.png", "b.png", "c.png"})
        ASSERT_TRUE(cv::imwrite((dir.path() / name).string(), img));
    const Tensor3 x = ingest_slices(dir.path());
    EXPECT_EQ(x.dims(), (Dims{8, 8, 3}));
    for (Index j = 0; j < 8; ++j)
        for (Index i = 0; i < 8; ++i) {
            EXPECT_EQ(x(i, j, 0), x(i, j, 1));
            EXPECT_EQ(x(i, j, 0), x(i, j, 2));
            EXPECT_DOUBLE_EQ(x(i, j, 0), img.at<unsigned char>(int(i), int(j)) / 255.0);
        }
}

TEST(Ingest, SingleImageAndScaling) {
    TempDir dir("single");
    cv::Mat img(4, 6, CV_8U, cv::Scalar(0));
    img.at<unsigned char>(1, 4) = 255;
    ASSERT_TRUE(cv::imwrite((dir.path() / "only.png").string(), img));
    const Tensor3 x = ingest_slices(dir.path());
    EXPECT_EQ(x.dims(), (Dims{4, 6, 1}));
    EXPECT_EQ(x(1, 4, 0), 1.0);
    EXPECT_EQ(x(0, 0, 0), 0.0);
    EXPECT_EQ(x.data().sum(), 1.0);
}

TEST(Ingest, SixteenBitScaling) {
    TempDir dir("deep");
    cv::Mat img(3, 3, CV_16U, cv::Scalar(0));
    img.at<unsigned short>(2, 2) = 65535;
    ASSERT_TRUE(cv::imwrite((dir.path() / "deep.png").string(), img));
    const Tensor3 x = ingest_slices(dir.path());
    EXPECT_EQ(x(2, 2, 0), 1.0);
}

TEST(Ingest, LexicographicOrder) {
    TempDir dir("order");
    ASSERT_TRUE(cv::imwrite((dir.path() / "b.png").string(), cv::Mat(2, 2, CV_8U, cv::Scalar(255))));
    ASSERT_TRUE(cv::imwrite((dir.path() / "a.png").string(), cv::Mat(2, 2, CV_8U, cv::Scalar(0))));
    const Tensor3 x = ingest_slices(dir.path());
    EXPECT_EQ(x(0, 0, 0), 0.0);
    EXPECT_EQ(x(0, 0, 1), 1.0);
}

TEST(Ingest, MixedDimensionsNameTheFile) {
    TempDir dir("mixed");
    ASSERT_TRUE(cv::imwrite((dir.path() / "a.png").string(), ramp(8, 8)));
    ASSERT_TRUE(cv::imwrite((dir.path() / "b.png").string(), ramp(8, 9)));
    try {
        ingest_slices(dir.path());
        FAIL() << "expected an error";
    } catch (const std::runtime_error &e) {
        EXPECT_NE(std::string(e.what()).find("b.png"), std::string::npos) << e.what();
    }
}

TEST(Ingest, UnreadableFileNameTheFile) {
    TempDir dir("broken");
    ASSERT_TRUE(cv::imwrite((dir.path() / "a.png").string(), ramp(4, 4)));
    std::ofstream(dir.path() / "junk.png") << "not an image";
    try {
        ingest_slices(dir.path());
        FAIL() << "expected an error";
    } catch (const std::runtime_error &e) {
        EXPECT_NE(std::string(e.what()).find("junk.png"), std::string::npos) << e.what();
    }
}

TEST(Ingest, EmptyOrMissingDirectory) {
    TempDir dir("empty");
    EXPECT_THROW(ingest_slices(dir.path()), std::runtime_error);
    EXPECT_THROW(ingest_slices(dir.path() / "nope"), std::runtime_error);
}

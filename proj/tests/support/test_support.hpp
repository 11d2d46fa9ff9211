#pragma once

#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
#ifdef SCIFORGE_FIXTURES
    return std::string(SCIFORGE_FIXTURES) + "/" + name;
#else
    return "tests/fixtures/" + name;
#endif
}

// Self-cleaning scratch directory for test outputs.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "sciforge") {
        std::string tmpl = (std::filesystem::temp_directory_path() / (tag + ".XXXXXX")).string();
        if (!mkdtemp(tmpl.data()))
            throw std::runtime_error("mkdtemp failed for " + tmpl);
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const { return path_ + "/" + name; }

private:
    std::string path_;
};

} // namespace testsupport

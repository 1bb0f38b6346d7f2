// Save settings to disk
public class ConfigWriter extends BaseWriter {
    void save(String text) {
        flush(text);
    }
}

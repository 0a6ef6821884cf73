package demo.plain;

import java.net.URL;

public class Plain {
    URL open() throws Exception {
        return new URL("https://plain-demo.com/api/ping");
    }
}

package com.demo.weather;

import java.io.IOException;
import java.net.URL;
import java.net.URLConnection;

public class WeatherClient {
    private static final String BASE = "https://api.weather-demo.com/v2";

    public URLConnection forecast(String city) throws IOException {
        URLConnection conn = new URL(BASE + "/forecast/daily?units=metric&city=" + city).openConnection();
        conn.setConnectTimeout(5000);
        return conn;
    }

    public URLConnection alerts() throws IOException {
        return new URL("https://api.weather-demo.com/v2/alerts#latest").openConnection();
    }
}

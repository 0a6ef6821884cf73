package com.demo.travel;

import org.apache.http.client.methods.HttpDelete;
import org.apache.http.client.methods.HttpGet;
import org.apache.http.client.methods.HttpPost;

public class TravelApi {
    HttpGet search() {
        return new HttpGet("https://travel-demo.com/search?from=ZRH&to=LIS#results");
    }

    HttpPost book() {
        return new HttpPost("https://travel-demo.com/bookings");
    }

    HttpDelete cancel() {
        return new HttpDelete("https://travel-demo.com/bookings/99");
    }
}

package com.example;

import com.squareup.moshi.JsonClass;

@JsonClass(generateAdapter = true)
public class User {
    Address address;
    String name = "Bob";
}

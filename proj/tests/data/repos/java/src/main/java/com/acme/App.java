package com.acme;

import java.util.List;
import com.acme.model.User;
import static com.acme.util.Strings.join;

public final class App {
    // Prints every user on its own line.
    public static void main(String[] args) {
        List<User> users = List.of(new User("Ada", "Lovelace"));
        for (User u : users) {
            System.out.println(join("user:", u.name()));
        }
    }
}
